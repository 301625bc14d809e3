package org.inkpad.io;

import java.io.IOException;
import java.nio.charset.StandardCharsets;
import java.nio.file.Files;
import java.nio.file.Path;
import java.nio.file.StandardCopyOption;
import java.security.MessageDigest;
import java.security.NoSuchAlgorithmException;

/**
 * Persists documents to disk with atomic replacement and rolling backups.
 */
public class DocumentSaver {
    private final Path backupDirectory;
    private final int maxBackups;

    public DocumentSaver(Path backupDirectory, int maxBackups) {
        this.backupDirectory = backupDirectory;
        this.maxBackups = maxBackups;
    }

    public void saveAtomically(Path target, String contents) throws IOException {
        Path temp = target.resolveSibling(target.getFileName() + ".tmp");
        Files.write(temp, contents.getBytes(StandardCharsets.UTF_8));
        if (Files.exists(target)) {
            writeBackupSnapshot(target);
        }
        Files.move(temp, target, StandardCopyOption.REPLACE_EXISTING, StandardCopyOption.ATOMIC_MOVE);
    }

    public Path writeBackupSnapshot(Path original) throws IOException {
        Files.createDirectories(backupDirectory);
        String stamp = Long.toString(System.currentTimeMillis() / 1000);
        Path backup = backupDirectory.resolve(original.getFileName() + "." + stamp + ".bak");
        Files.copy(original, backup, StandardCopyOption.REPLACE_EXISTING);
        pruneOldBackups(original.getFileName().toString());
        return backup;
    }

    private void pruneOldBackups(String baseName) throws IOException {
        try (var stream = Files.list(backupDirectory)) {
            var backups = stream.filter(p -> p.getFileName().toString().startsWith(baseName))
                                .sorted()
                                .toList();
            for (int i = 0; i + maxBackups < backups.size(); i++) {
                Files.deleteIfExists(backups.get(i));
            }
        }
    }

    public String computeChecksum(String contents) {
        try {
            MessageDigest digest = MessageDigest.getInstance("SHA-256");
            byte[] hash = digest.digest(contents.getBytes(StandardCharsets.UTF_8));
            StringBuilder hex = new StringBuilder();
            for (byte b : hash) {
                hex.append(String.format("%02x", b));
            }
            return hex.toString();
        } catch (NoSuchAlgorithmException e) {
            throw new IllegalStateException(e);
        }
    }
}
