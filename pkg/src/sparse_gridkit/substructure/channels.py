"""
In-process message passing between subdomain workers.

Each (source, destination, tag) triple is a bounded FIFO queue. Sends
copy their payload, so a sender may reuse its buffer at once. Receives wait
at most `timeout` seconds and give up early when the group is cancelled.
"""

import queue
import threading
import time
from typing import Dict, Optional, Tuple

import numpy as np

from ..config import exchange_timeout
from ..errors import BufferLengthMismatch, ProtocolDeadlock, SparseGridkitError

TAG_INTERFACE = "interface"
TAG_CHECK = "check"
TAG_REDUCE = "reduce"
TAG_BROADCAST = "broadcast"

POLL_INTERVAL = 0.05


class GroupCancelled(SparseGridkitError):
    """Raised in a worker when another worker of its group failed"""


class ChannelGroup:
    def __init__(self, size: int, timeout: Optional[float] = None, capacity: int = 64):
        if size < 1:
            raise ValueError(f"group size must be >= 1, got {size}")
        self.size = size
        self.timeout = exchange_timeout() if timeout is None else timeout
        self.capacity = capacity
        self.cancelled = threading.Event()
        self._queues: Dict[Tuple[int, int, str], queue.Queue] = {}
        self._lock = threading.Lock()

    def channel(self, src: int, dst: int, tag: str) -> queue.Queue:
        key = (src, dst, tag)
        with self._lock:
            channel = self._queues.get(key)
            if channel is None:
                channel = queue.Queue(maxsize=self.capacity)
                self._queues[key] = channel
            return channel

    def cancel(self) -> None:
        self.cancelled.set()

    def endpoint(self, rank: int) -> "Communicator":
        if not 0 <= rank < self.size:
            raise ValueError(f"rank {rank} outside group of {self.size}")
        return Communicator(self, rank)


class Communicator:
    """One worker's view of its group"""

    def __init__(self, group: ChannelGroup, rank: int):
        self.group = group
        self.rank = rank
        self.size = group.size

    def _wait(self, operation, what: str):
        deadline = time.monotonic() + self.group.timeout
        while True:
            if self.group.cancelled.is_set():
                raise GroupCancelled(f"rank {self.rank}: group cancelled during {what}")
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                raise ProtocolDeadlock(f"rank {self.rank}: {what} timed out after {self.group.timeout:.1f} s")
            try:
                return operation(min(POLL_INTERVAL, remaining))
            except (queue.Empty, queue.Full):
                continue

    def send(self, dst: int, tag: str, payload) -> None:
        message = np.array(payload, copy=True)
        channel = self.group.channel(self.rank, dst, tag)
        self._wait(lambda t: channel.put(message, timeout=t), f"send to {dst} ({tag})")

    def recv(self, src: int, tag: str, expected_length: Optional[int] = None) -> np.ndarray:
        channel = self.group.channel(src, self.rank, tag)
        message = self._wait(lambda t: channel.get(timeout=t), f"receive from {src} ({tag})")
        if expected_length is not None and message.size != expected_length:
            raise BufferLengthMismatch(
                f"rank {self.rank}: {tag} buffer from {src} has {message.size} values, expected {expected_length}"
            )
        return message

    def allreduce_sum(self, value: float) -> float:
        """Gather partials on rank 0, add them in rank order, broadcast the total"""
        if self.size == 1:
            return value
        if self.rank == 0:
            total = value
            for src in range(1, self.size):
                total += float(self.recv(src, TAG_REDUCE, expected_length=1)[0])
            for dst in range(1, self.size):
                self.send(dst, TAG_BROADCAST, [total])
            return total
        self.send(0, TAG_REDUCE, [value])
        return float(self.recv(0, TAG_BROADCAST, expected_length=1)[0])
