// Thin socket wrapper with an injectable transport so tests can drive the
// client against a stub server.

import type { ClientMessage, LayerId, ServerFrame } from "./protocol.js";
import { parseFrame } from "./protocol.js";

export interface SocketLike {
  send(data: string): void;
  close(): void;
  set onmessage(handler: (event: { data: string }) => void);
  set onopen(handler: () => void);
  set onclose(handler: () => void);
}

export type SocketFactory = () => SocketLike;

export function defaultSocketFactory(): SocketLike {
  const proto = location.protocol === "https:" ? "wss" : "ws";
  return new WebSocket(`${proto}://${location.host}/ws`) as unknown as SocketLike;
}

export class MapClient {
  private socket: SocketLike;

  constructor(
    factory: SocketFactory,
    private readonly onFrame: (frame: ServerFrame) => void,
    private readonly onOpen?: () => void,
  ) {
    this.socket = factory();
    this.socket.onmessage = (event) => {
      const frame = parseFrame(event.data);
      if (frame !== null) {
        this.onFrame(frame);
      }
    };
    this.socket.onopen = () => this.onOpen?.();
  }

  send(message: ClientMessage): void {
    this.socket.send(JSON.stringify(message));
  }

  setDate(date: string): void {
    this.send({ op: "set_date", date });
  }

  setLayer(layer: LayerId): void {
    this.send({ op: "set_layer", layer });
  }

  setFires(enabled: boolean): void {
    this.send({ op: "set_fires", enabled });
  }

  close(): void {
    this.socket.close();
  }
}
