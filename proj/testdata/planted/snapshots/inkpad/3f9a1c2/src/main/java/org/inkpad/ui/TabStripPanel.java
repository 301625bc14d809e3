package org.inkpad.ui;

import java.util.ArrayList;
import java.util.List;

/**
 * Horizontal strip of editor tabs supporting drag reordering.
 */
public class TabStripPanel {
    private final List<EditorTab> tabs = new ArrayList<>();
    private int activeIndex = -1;

    public void addTab(EditorTab tab) {
        tabs.add(tab);
        if (activeIndex < 0) {
            activeIndex = 0;
        }
    }

    public void reorderTabs(int fromIndex, int dropIndex) {
        if (fromIndex < 0 || fromIndex >= tabs.size()) {
            return;
        }
        EditorTab dragged = tabs.remove(fromIndex);
        int insertAt = dropIndex;
        if (insertAt > tabs.size()) {
            insertAt = tabs.size();
        }
        tabs.add(insertAt, dragged);
        if (activeIndex == fromIndex) {
            activeIndex = insertAt;
        }
    }

    public void closeTab(int index) {
        if (index < 0 || index >= tabs.size()) {
            return;
        }
        EditorTab closing = tabs.remove(index);
        closing.dispose();
        if (tabs.isEmpty()) {
            activeIndex = -1;
        } else if (activeIndex >= tabs.size()) {
            activeIndex = tabs.size() - 1;
        }
    }

    public String renderTabBadge(EditorTab tab) {
        StringBuilder label = new StringBuilder(tab.title());
        if (tab.isModified()) {
            label.append(" •");
        }
        if (tab.isReadOnly()) {
            label.append(" [ro]");
        }
        return label.toString();
    }

    public int activeIndex() {
        return activeIndex;
    }
}
