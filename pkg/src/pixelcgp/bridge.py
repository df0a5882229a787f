"""Client for an out-of-process Atari emulator server.

The wire protocol is line-framed requests with mixed text/binary replies:

    -> INIT <rom>\n
    <- OK <width> <height> <k> <a1> ... <ak>\n      (a_i: global action ids)
    <- ERR <reason>\n

    -> ACT <global action id>\n
    <- R <reward> <done 0|1>\n
       followed by 3*width*height raw bytes: red, green, blue planes,
       row-major, one byte per pixel (scaled by 1/255 on this side).

Requests and replies strictly alternate. Any malformed reply, short read or
server exit raises BridgeError; a violation never degrades into a silent
zero observation.

The evolved program sees only the game's legal action subset: local output
index i maps to the i-th entry of the handshake's action list, which indexes
the full 18-action controller table.
"""

from __future__ import annotations

import shlex
import subprocess

import numpy as np

from .envs import Observation

# Full controller action table; games expose a subset via the handshake.
ACTION_TABLE = [
    "NOOP", "FIRE", "UP", "RIGHT", "LEFT", "DOWN",
    "UP_RIGHT", "UP_LEFT", "DOWN_RIGHT", "DOWN_LEFT",
    "UP_FIRE", "RIGHT_FIRE", "LEFT_FIRE", "DOWN_FIRE",
    "UP_RIGHT_FIRE", "UP_LEFT_FIRE", "DOWN_RIGHT_FIRE", "DOWN_LEFT_FIRE",
]
N_GLOBAL_ACTIONS = len(ACTION_TABLE)
NOOP = 0


class BridgeError(Exception):
    """Protocol violation, malformed reply or server failure."""


class BridgeSession:
    """One emulator process speaking the framed protocol for one episode."""

    def __init__(self, server_cmd: str, rom: str, rom_dir: str | None = None):
        cmd = shlex.split(server_cmd)
        if rom_dir:
            cmd.append(rom_dir)
        try:
            self.proc = subprocess.Popen(
                cmd, stdin=subprocess.PIPE, stdout=subprocess.PIPE)
        except OSError as exc:
            raise BridgeError(f"cannot start emulator server: {exc}") from exc
        self.width = self.height = 0
        self.legal_actions: list[int] = []
        self.frame_count = 0
        self._handshake(rom)

    def _send(self, line: str) -> None:
        try:
            self.proc.stdin.write((line + "\n").encode("ascii"))
            self.proc.stdin.flush()
        except (BrokenPipeError, ValueError) as exc:
            raise BridgeError(f"server pipe closed while sending {line!r}") from exc

    def _recv_line(self) -> str:
        raw = self.proc.stdout.readline()
        if not raw.endswith(b"\n"):
            raise BridgeError("server closed the stream mid-reply")
        return raw.decode("ascii", errors="replace").strip()

    def _recv_exact(self, n: int) -> bytes:
        buf = b""
        while len(buf) < n:
            chunk = self.proc.stdout.read(n - len(buf))
            if not chunk:
                raise BridgeError(
                    f"short frame read: wanted {n} bytes, got {len(buf)}")
            buf += chunk
        return buf

    def _handshake(self, rom: str) -> None:
        self._send(f"INIT {rom}")
        reply = self._recv_line().split()
        if not reply or reply[0] != "OK":
            raise BridgeError(f"handshake rejected: {' '.join(reply)}")
        try:
            w, h, k = (int(t) for t in reply[1:4])
            actions = [int(t) for t in reply[4:]]
        except ValueError as exc:
            raise BridgeError(f"malformed handshake reply: {reply}") from exc
        if len(actions) != k or not (1 <= k <= N_GLOBAL_ACTIONS):
            raise BridgeError(f"handshake action list mismatch: {reply}")
        if any(not 0 <= a < N_GLOBAL_ACTIONS for a in actions):
            raise BridgeError(f"handshake action id out of range: {actions}")
        self.width, self.height = w, h
        self.legal_actions = actions

    def act(self, global_action: int) -> tuple[Observation, float, bool]:
        self._send(f"ACT {global_action}")
        reply = self._recv_line().split()
        if len(reply) != 3 or reply[0] != "R":
            raise BridgeError(f"malformed step reply: {reply}")
        try:
            reward = float(reply[1])
            done = bool(int(reply[2]))
        except ValueError as exc:
            raise BridgeError(f"malformed step reply: {reply}") from exc
        plane_len = self.width * self.height
        raw = self._recv_exact(3 * plane_len)
        planes = []
        for i in range(3):
            data = np.frombuffer(raw[i * plane_len : (i + 1) * plane_len],
                                 dtype=np.uint8)
            planes.append(data.astype(np.float64).reshape(
                self.height, self.width) / 255.0)
        self.frame_count += 1
        return Observation(*planes), reward, done

    def close(self) -> None:
        if self.proc.poll() is None:
            self.proc.terminate()
            try:
                self.proc.wait(timeout=5)
            except subprocess.TimeoutExpired:
                self.proc.kill()


class AleBridgeEnv:
    """Environment adapter: one bridge session per episode.

    reset() starts a fresh server process and, after the handshake, fetches
    the first frame with a no-op action so the controller has an observation
    before its first decision.
    """

    def __init__(self, server_cmd: str, rom: str, rom_dir: str | None = None):
        self.server_cmd = server_cmd
        self.rom = rom
        self.rom_dir = rom_dir
        self.session: BridgeSession | None = None
        self.done = True
        # one throwaway session to learn the action count up front
        probe = BridgeSession(server_cmd, rom, rom_dir)
        self.n_actions = len(probe.legal_actions)
        self.screen = (probe.height, probe.width)
        probe.close()

    def reset(self, seed=None) -> Observation:
        # seed accepted for contract compatibility; the emulator owns its RNG
        if self.session is not None:
            self.session.close()
        self.session = BridgeSession(self.server_cmd, self.rom, self.rom_dir)
        if len(self.session.legal_actions) != self.n_actions:
            raise BridgeError("legal action list changed between sessions")
        obs, _, self.done = self.session.act(NOOP)
        return obs

    def step(self, action: int) -> tuple[Observation, float, bool]:
        if self.session is None or self.done:
            raise BridgeError("step without an open episode")
        if not 0 <= action < self.n_actions:
            raise BridgeError(f"local action {action} out of range")
        obs, reward, done = self.session.act(self.session.legal_actions[action])
        self.done = done
        return obs, reward, done

    def close(self) -> None:
        if self.session is not None:
            self.session.close()
            self.session = None
