"""Live telemetry: length-prefixed JSON messages over a local TCP socket.

Framing: 4-byte big-endian payload length, then UTF-8 JSON. Outbound message
types are ``hello`` (static scene description, sent once per client),
``state`` (decimated per-tick snapshot) and ``report`` (final). Inbound
commands are ``wrench`` (``force``/``torque`` arrays), ``pause``, ``resume``
and ``reset``.

One publisher thread drains a bounded per-client queue (drop-oldest), so a
slow viewer never stalls the control loop; the loop thread only enqueues.
"""

import json
import queue
import socket
import struct
import threading

HEADER = struct.Struct(">I")
MAX_MESSAGE = 16 * 1024 * 1024


def encode_message(obj):
    payload = json.dumps(obj, sort_keys=True, separators=(",", ":")).encode("utf-8")
    return HEADER.pack(len(payload)) + payload


class MessageReader:
    """Incremental decoder for a length-prefixed JSON byte stream."""

    def __init__(self):
        self._buf = bytearray()
        self.dropped = 0

    def feed(self, chunk):
        """Consume bytes, return the list of decoded messages."""
        self._buf.extend(chunk)
        out = []
        while True:
            if len(self._buf) < HEADER.size:
                return out
            (length,) = HEADER.unpack_from(self._buf)
            if length > MAX_MESSAGE:
                raise ValueError(f"message of {length} bytes exceeds limit")
            if len(self._buf) < HEADER.size + length:
                return out
            payload = bytes(self._buf[HEADER.size:HEADER.size + length])
            del self._buf[:HEADER.size + length]
            try:
                out.append(json.loads(payload.decode("utf-8")))
            except (UnicodeDecodeError, json.JSONDecodeError):
                self.dropped += 1


class _Client:
    def __init__(self, sock, hello, commands, max_queue):
        self.sock = sock
        self.queue = queue.Queue(maxsize=max_queue)
        self.alive = True
        self._commands = commands
        self.queue.put(encode_message(hello))
        self._sender = threading.Thread(target=self._send_loop, daemon=True)
        self._reader = threading.Thread(target=self._read_loop, daemon=True)
        self._sender.start()
        self._reader.start()

    def enqueue(self, data, drop_oldest=True):
        if not self.alive:
            return
        while True:
            try:
                self.queue.put_nowait(data)
                return
            except queue.Full:
                if not drop_oldest:
                    return
                try:
                    self.queue.get_nowait()
                except queue.Empty:
                    pass

    def _send_loop(self):
        # Drain until the poison pill so queued frames (e.g. the final
        # report) still go out during shutdown.
        try:
            while True:
                data = self.queue.get()
                if data is None:
                    break
                self.sock.sendall(data)
        except OSError:
            pass
        finally:
            self.alive = False
            try:
                self.sock.close()
            except OSError:
                pass

    def _read_loop(self):
        reader = MessageReader()
        try:
            while self.alive:
                chunk = self.sock.recv(65536)
                if not chunk:
                    break
                try:
                    messages = reader.feed(chunk)
                except ValueError:
                    break
                for msg in messages:
                    if isinstance(msg, dict):
                        self._commands.put(msg)
        except OSError:
            pass
        finally:
            self.alive = False

    def stop(self, flush_timeout=2.0):
        # Poison pill wakes the sender; give it a moment to flush queued
        # frames before tearing the socket down.
        try:
            self.queue.put_nowait(None)
        except queue.Full:
            try:
                self.queue.get_nowait()
                self.queue.put_nowait(None)
            except (queue.Empty, queue.Full):
                pass
        self._sender.join(timeout=flush_timeout)
        self.alive = False
        try:
            self.sock.shutdown(socket.SHUT_RDWR)
        except OSError:
            pass


class TelemetryServer:
    """Accepts viewers, broadcasts snapshots, collects inbound commands."""

    def __init__(self, host="127.0.0.1", port=0, hello=None, max_queue=256):
        self._hello = {"type": "hello", **(hello or {})}
        self._commands = queue.Queue()
        self._clients = []
        self._lock = threading.Lock()
        self._listener = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        self._listener.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        self._listener.bind((host, port))
        self._listener.listen(8)
        self.address = self._listener.getsockname()
        self._running = True
        self._acceptor = threading.Thread(target=self._accept_loop, daemon=True)
        self._acceptor.start()

    def _accept_loop(self):
        while self._running:
            try:
                sock, _ = self._listener.accept()
            except OSError:
                return
            sock.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
            with self._lock:
                self._clients.append(
                    _Client(sock, self._hello, self._commands, 256)
                )

    def _broadcast(self, obj, drop_oldest):
        data = encode_message(obj)
        with self._lock:
            self._clients = [c for c in self._clients if c.alive]
            for client in self._clients:
                client.enqueue(data, drop_oldest=drop_oldest)

    def publish_state(self, snapshot):
        self._broadcast({"type": "state", **snapshot}, drop_oldest=True)

    def publish_report(self, report):
        self._broadcast({"type": "report", "report": report}, drop_oldest=False)

    def poll_commands(self):
        out = []
        while True:
            try:
                out.append(self._commands.get_nowait())
            except queue.Empty:
                return out

    @property
    def client_count(self):
        with self._lock:
            return sum(1 for c in self._clients if c.alive)

    def close(self):
        self._running = False
        try:
            self._listener.close()
        except OSError:
            pass
        with self._lock:
            for client in self._clients:
                client.stop()
            self._clients = []


def connect(host, port, timeout=5.0):
    """Blocking client used by tests and tooling: returns (socket, reader)."""
    sock = socket.create_connection((host, port), timeout=timeout)
    sock.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
    return sock, MessageReader()
