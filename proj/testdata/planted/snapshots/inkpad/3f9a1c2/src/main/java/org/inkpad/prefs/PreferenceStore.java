package org.inkpad.prefs;

import java.io.IOException;
import java.io.Reader;
import java.io.Writer;
import java.util.Map;
import java.util.Properties;
import java.util.TreeMap;

/**
 * Key-value user preferences backed by a properties file.
 */
public class PreferenceStore {
    private static final Map<String, String> LEGACY_RENAMES = Map.of(
        "editor.tabwidth", "editor.tab.width",
        "ui.darkmode", "ui.theme",
        "spell.lang", "spellcheck.language");

    private final Map<String, String> values = new TreeMap<>();

    public void loadDefaults() {
        values.put("editor.tab.width", "4");
        values.put("ui.theme", "light");
        values.put("spellcheck.language", "en-US");
        values.put("autosave.interval.seconds", "30");
    }

    public void migrateLegacyKeys(Properties stored) {
        for (Map.Entry<String, String> rename : LEGACY_RENAMES.entrySet()) {
            String legacyValue = stored.getProperty(rename.getKey());
            if (legacyValue != null) {
                stored.remove(rename.getKey());
                String newValue = rename.getKey().equals("ui.darkmode")
                    ? (Boolean.parseBoolean(legacyValue) ? "dark" : "light")
                    : legacyValue;
                stored.setProperty(rename.getValue(), newValue);
            }
        }
    }

    public void load(Reader reader) throws IOException {
        Properties stored = new Properties();
        stored.load(reader);
        migrateLegacyKeys(stored);
        for (String key : stored.stringPropertyNames()) {
            values.put(key, stored.getProperty(key));
        }
    }

    public void persist(Writer writer) throws IOException {
        Properties out = new Properties();
        out.putAll(values);
        out.store(writer, "inkpad preferences");
    }

    public String get(String key) {
        return values.get(key);
    }
}
