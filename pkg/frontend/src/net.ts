// Socket lifecycle: connect, hand text to the client, reconnect with a
// capped backoff. The view freezes on its last snapshot while offline.

export interface NetHandlers {
  onText(chunk: string): void;
  onStatus(connected: boolean): void;
}

export interface NetHandle {
  send(data: string): void;
  close(): void;
}

export function connectSession(url: string, handlers: NetHandlers): NetHandle {
  let ws: WebSocket | null = null;
  let closed = false;
  let delayMs = 250;

  const open = () => {
    if (closed) return;
    ws = new WebSocket(url);
    ws.onopen = () => {
      delayMs = 250;
      handlers.onStatus(true);
    };
    ws.onmessage = (ev) => handlers.onText(String(ev.data));
    ws.onclose = () => {
      handlers.onStatus(false);
      if (!closed) {
        setTimeout(open, delayMs);
        delayMs = Math.min(delayMs * 2, 4000);
      }
    };
    ws.onerror = () => ws?.close();
  };
  open();

  return {
    send(data: string) {
      if (ws && ws.readyState === WebSocket.OPEN) ws.send(data);
    },
    close() {
      closed = true;
      ws?.close();
    },
  };
}
