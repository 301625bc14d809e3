package org.inkpad.render;

import java.util.ArrayList;
import java.util.HashMap;
import java.util.List;
import java.util.Map;

/**
 * Loads font families and resolves glyphs for the text renderer.
 */
public class FontController {
    private final Map<String, FontFamily> families = new HashMap<>();
    private final List<String> fallbackChain = new ArrayList<>();
    private float defaultPointSize = 12.0f;

    public FontController(List<String> fallbacks) {
        fallbackChain.addAll(fallbacks);
    }

    public FontFamily loadFontFamily(String name) {
        FontFamily family = families.get(name);
        if (family == null) {
            family = FontFamily.fromSystem(name);
            if (family == null) {
                throw new IllegalArgumentException("unknown font family " + name);
            }
            families.put(name, family);
        }
        return family;
    }

    public Glyph resolveGlyphFallback(FontFamily primary, int codePoint) {
        Glyph glyph = primary.glyphFor(codePoint);
        if (glyph != null) {
            return glyph;
        }
        for (String candidate : fallbackChain) {
            FontFamily fallback = loadFontFamily(candidate);
            Glyph fromFallback = fallback.glyphFor(codePoint);
            if (fromFallback != null && fromFallback.advanceWidth() > 0) {
                return fromFallback;
            }
        }
        return Glyph.tofu(codePoint, defaultPointSize);
    }

    public float measureKerning(FontFamily family, int left, int right) {
        KerningTable table = family.kerningTable();
        if (table == null) {
            return 0.0f;
        }
        float adjustment = table.pairAdjustment(left, right);
        return adjustment * defaultPointSize / family.unitsPerEm();
    }

    public void setDefaultPointSize(float size) {
        if (size <= 0) {
            throw new IllegalArgumentException("point size must be positive");
        }
        this.defaultPointSize = size;
    }
}
