import threading
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest

from src.sparse_gridkit.errors import BufferLengthMismatch, ProtocolDeadlock
from src.sparse_gridkit.substructure import ChannelGroup, GroupCancelled
from src.sparse_gridkit.substructure.channels import TAG_INTERFACE


class TestChannels:
    def test_send_then_receive(self):
        group = ChannelGroup(2, timeout=1.0)
        a, b = group.endpoint(0), group.endpoint(1)
        a.send(1, TAG_INTERFACE, [1.0, 2.0])
        assert b.recv(0, TAG_INTERFACE, expected_length=2).tolist() == [1.0, 2.0]

    def test_payload_is_copied(self):
        group = ChannelGroup(2, timeout=1.0)
        buffer = np.array([1.0, 2.0])
        group.endpoint(0).send(1, TAG_INTERFACE, buffer)
        buffer[:] = 0.0
        assert group.endpoint(1).recv(0, TAG_INTERFACE).tolist() == [1.0, 2.0]

    def test_fifo_per_tag(self):
        group = ChannelGroup(2, timeout=1.0)
        sender, receiver = group.endpoint(0), group.endpoint(1)
        for value in range(3):
            sender.send(1, TAG_INTERFACE, [float(value)])
        sender.send(1, "other", [9.0])
        assert receiver.recv(0, "other").tolist() == [9.0]
        assert [receiver.recv(0, TAG_INTERFACE)[0] for _ in range(3)] == [0.0, 1.0, 2.0]

    def test_missing_message_times_out(self):
        group = ChannelGroup(2, timeout=0.2)
        with pytest.raises(ProtocolDeadlock):
            group.endpoint(1).recv(0, TAG_INTERFACE)

    def test_full_channel_times_out(self):
        group = ChannelGroup(2, timeout=0.2, capacity=1)
        sender = group.endpoint(0)
        sender.send(1, TAG_INTERFACE, [1.0])
        with pytest.raises(ProtocolDeadlock):
            sender.send(1, TAG_INTERFACE, [2.0])

    def test_buffer_length_mismatch(self):
        group = ChannelGroup(2, timeout=1.0)
        group.endpoint(0).send(1, TAG_INTERFACE, [1.0, 2.0, 3.0])
        with pytest.raises(BufferLengthMismatch):
            group.endpoint(1).recv(0, TAG_INTERFACE, expected_length=2)

    def test_cancel_wakes_waiting_receiver(self):
        group = ChannelGroup(2, timeout=30.0)
        errors = []

        def wait():
            try:
                group.endpoint(1).recv(0, TAG_INTERFACE)
            except GroupCancelled as error:
                errors.append(error)

        waiter = threading.Thread(target=wait)
        waiter.start()
        group.cancel()
        waiter.join(timeout=5.0)
        assert not waiter.is_alive()
        assert len(errors) == 1

    def test_bad_group(self):
        with pytest.raises(ValueError):
            ChannelGroup(0)
        with pytest.raises(ValueError):
            ChannelGroup(2).endpoint(2)


class TestAllreduce:
    @pytest.mark.parametrize("size", [1, 2, 5])
    def test_sum_in_rank_order(self, size):
        group = ChannelGroup(size, timeout=5.0)
        partials = [0.1 * (rank + 1) for rank in range(size)]
        expected = partials[0]
        for value in partials[1:]:
            expected += value
        with ThreadPoolExecutor(max_workers=size) as pool:
            futures = [pool.submit(group.endpoint(rank).allreduce_sum, partials[rank]) for rank in range(size)]
            totals = [f.result() for f in futures]
        assert totals == [expected] * size
