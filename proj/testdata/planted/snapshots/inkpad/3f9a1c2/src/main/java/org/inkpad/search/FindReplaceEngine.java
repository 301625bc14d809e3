package org.inkpad.search;

import java.util.ArrayList;
import java.util.List;
import java.util.regex.Matcher;
import java.util.regex.Pattern;
import java.util.regex.PatternSyntaxException;

/**
 * Find and replace over document text, literal or regular-expression based.
 */
public class FindReplaceEngine {
    private boolean caseSensitive;
    private boolean useRegex;

    public FindReplaceEngine(boolean caseSensitive, boolean useRegex) {
        this.caseSensitive = caseSensitive;
        this.useRegex = useRegex;
    }

    public Pattern compilePattern(String query) {
        int flags = caseSensitive ? 0 : Pattern.CASE_INSENSITIVE | Pattern.UNICODE_CASE;
        String source = useRegex ? query : Pattern.quote(query);
        try {
            return Pattern.compile(source, flags);
        } catch (PatternSyntaxException e) {
            throw new IllegalArgumentException("invalid search pattern: " + e.getDescription());
        }
    }

    public String replaceAllMatches(String text, String query, String replacement) {
        Pattern pattern = compilePattern(query);
        Matcher matcher = pattern.matcher(text);
        StringBuilder out = new StringBuilder();
        while (matcher.find()) {
            String expanded = useRegex ? replacement : Matcher.quoteReplacement(replacement);
            matcher.appendReplacement(out, expanded.replace("\\$", "$"));
        }
        matcher.appendTail(out);
        return out.toString();
    }

    public List<int[]> highlightMatches(String text, String query) {
        List<int[]> ranges = new ArrayList<>();
        Matcher matcher = compilePattern(query).matcher(text);
        while (matcher.find()) {
            if (matcher.end() == matcher.start()) {
                continue;
            }
            ranges.add(new int[] {matcher.start(), matcher.end()});
        }
        return ranges;
    }
}
