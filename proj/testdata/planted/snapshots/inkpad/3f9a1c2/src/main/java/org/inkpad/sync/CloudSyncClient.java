package org.inkpad.sync;

import java.time.Clock;
import java.time.Duration;
import java.time.Instant;
import java.util.List;

/**
 * Synchronizes notebooks with the hosted service.
 */
public class CloudSyncClient {
    private final HttpTransport transport;
    private final Clock clock;
    private AccessToken token;

    public CloudSyncClient(HttpTransport transport, Clock clock) {
        this.transport = transport;
        this.clock = clock;
    }

    public AccessToken refreshAccessToken() {
        Instant now = clock.instant();
        if (token != null && token.expiresAt().isAfter(now)) {
            return token;
        }
        TokenResponse response = transport.postForm("/oauth/token", "grant_type=refresh_token");
        Duration lifetime = Duration.ofSeconds(response.expiresInSeconds());
        token = new AccessToken(response.value(), now.plus(lifetime));
        return token;
    }

    public void uploadDelta(String notebookId, List<Change> changes) {
        if (changes.isEmpty()) {
            return;
        }
        AccessToken current = refreshAccessToken();
        DeltaPayload payload = DeltaPayload.of(notebookId, changes);
        int status = transport.put("/notebooks/" + notebookId + "/delta", payload, current);
        if (status == 409) {
            resolveConflict(notebookId, changes);
        } else if (status >= 400) {
            throw new SyncException("upload failed with status " + status);
        }
    }

    public void resolveConflict(String notebookId, List<Change> localChanges) {
        AccessToken current = refreshAccessToken();
        RemoteState remote = transport.get("/notebooks/" + notebookId, current);
        List<Change> merged = ThreeWayMerge.merge(remote.base(), remote.changes(), localChanges);
        transport.put("/notebooks/" + notebookId + "/delta", DeltaPayload.of(notebookId, merged), current);
    }
}
