# This code is part of OSTA Selection.
#
# (C) Copyright OSTA Selection Developers 2026.
#
# This code is licensed under the Apache License, Version 2.0. You may
# obtain a copy of this license in the LICENSE.txt file in the root directory
# of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.
#
# Any modifications or derivative works of this code must retain this
# copyright notice, and modified files need to carry a notice indicating
# that they have been altered from the originals.

"""Tests for the service utilities."""

import logging
import os
import threading
import time
from datetime import datetime, timezone
from test.osta_test_case import OstaTestCase

from osta_selection.service import WorkerPool, log_to_file, run_parallel
from osta_selection.service.utils import log_level, str_to_utc, utc_now


def slow_square(value: int) -> int:
    """Square ``value``, finishing later for smaller inputs."""
    time.sleep(0.01 * (5 - value))
    return value * value


def fail_on_odd(value: int) -> int:
    """Raise for odd values."""
    if value % 2:
        raise RuntimeError(f"odd {value}")
    return value


class TestWorkerPool(OstaTestCase):
    """Test the bounded worker pool."""

    def test_results_in_submission_order(self):
        """Test that results follow the items, not their completion."""
        done, failed = WorkerPool([1, 2, 3, 4], slow_square, max_workers=4).results()
        self.assertEqual(done, [(1, 1), (2, 4), (3, 9), (4, 16)])
        self.assertEqual(failed, [])

    def test_tuple_items(self):
        """Test that tuple items are unpacked into arguments."""
        done, _ = WorkerPool([(2, 3), (4, 5)], pow, max_workers=2).results()
        self.assertEqual([result for _, result in done], [8, 1024])

    def test_failures(self):
        """Test that failing items are reported with their exception."""
        done, failed = WorkerPool(range(5), fail_on_odd, max_workers=2).results()
        self.assertEqual([item for item, _ in done], [0, 2, 4])
        self.assertEqual(sorted(f["data"] for f in failed), [1, 3])
        self.assertTrue(all(isinstance(f["exception"], RuntimeError) for f in failed))

    def test_run_parallel(self):
        """Test that serial and threaded maps agree."""
        self.assertEqual(run_parallel([1, 2, 3], slow_square), [1, 4, 9])
        self.assertEqual(run_parallel([1, 2, 3], slow_square, workers=3), [1, 4, 9])

    def test_run_parallel_raises_first_failure(self):
        """Test that the first failing item's exception is raised."""
        for workers in (1, 3):
            with self.subTest(workers=workers):
                with self.assertRaisesRegex(RuntimeError, "odd 1"):
                    run_parallel([0, 1, 2, 3], fail_on_odd, workers=workers)


class TestLogging(OstaTestCase):
    """Test the per-run log capture."""

    def test_log_to_file_current_context(self):
        """Test that unrelated threads and records below the handler level stay out of the file."""
        logger = logging.getLogger("osta_selection.test_capture")
        path = os.path.join(self.make_temp_dir(), "run.log")
        with log_level(logging.DEBUG), log_to_file(path):
            logger.info("key=main")
            logger.debug("key=hidden")
            other = threading.Thread(target=logger.info, args=("key=other",))
            other.start()
            other.join()
        logger.info("key=after")
        with open(path) as log_in:
            text = log_in.read()
        self.assertIn("key=main", text)
        self.assertIn("level=INFO", text)
        self.assertNotIn("key=hidden", text)
        self.assertNotIn("key=other", text)
        self.assertNotIn("key=after", text)

    def test_log_to_file_follows_pool_tasks(self):
        """Test that tasks handed to the pool log to the capture that started them."""
        logger = logging.getLogger("osta_selection.test_capture")
        directory = self.make_temp_dir()
        outer, inner = os.path.join(directory, "outer.log"), os.path.join(directory, "inner.log")

        def member(value: int) -> int:
            logger.info("key=worker value=%d", value)
            return value

        def nested(value: int) -> int:
            with log_to_file(inner):
                logger.info("key=nested value=%d", value)
            return value

        with log_level(logging.INFO), log_to_file(outer):
            run_parallel([1, 2, 3], member, workers=3)
            WorkerPool([4], nested, max_workers=2).results()
        with open(outer) as log_in:
            text = log_in.read()
        for value in (1, 2, 3):
            self.assertIn(f"key=worker value={value}", text)
        self.assertNotIn("key=nested", text)
        with open(inner) as log_in:
            self.assertIn("key=nested value=4", log_in.read())

    def test_log_level_restored(self):
        """Test that the package level is lowered only within the block."""
        package = logging.getLogger("osta_selection")
        previous = package.level
        package.setLevel(logging.WARNING)
        try:
            with log_level(logging.INFO):
                self.assertEqual(package.level, logging.INFO)
            self.assertEqual(package.level, logging.WARNING)
            package.setLevel(logging.DEBUG)
            with log_level(logging.INFO):
                self.assertEqual(package.level, logging.DEBUG)
        finally:
            package.setLevel(previous)


class TestTimestamps(OstaTestCase):
    """Test the timestamp converters."""

    def test_str_to_utc(self):
        """Test parsing ISO timestamps."""
        expected = datetime(2026, 3, 4, 5, 6, 7, tzinfo=timezone.utc)
        self.assertEqual(str_to_utc("2026-03-04T05:06:07Z"), expected)
        self.assertEqual(str_to_utc("2026-03-04T05:06:07+00:00"), expected)
        self.assertIsNone(str_to_utc(None))
        self.assertIsNone(str_to_utc(""))

    def test_utc_now(self):
        """Test that the current time round-trips through the parser."""
        stamp = utc_now()
        self.assertTrue(stamp.endswith("Z"))
        self.assertEqual(str_to_utc(stamp).tzinfo, timezone.utc)
