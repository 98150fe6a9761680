"""
Tests for executor adapters and the shared pool
"""
import unittest

from toral_mass.executors import get_executor, reset_executor, SerialAdapter, ThreadPoolAdapter
from toral_mass.tests.test_utils import get_test_config


class ExecutorTest(unittest.TestCase):
    """Test cases for get_executor and the adapters"""

    def tearDown(self):
        reset_executor()

    def test_serial_for_one_thread(self):
        """Test single thread uses the serial adapter"""
        executor = get_executor(get_test_config(threads=1))

        self.assertIsInstance(executor, SerialAdapter)
        self.assertEqual(executor.threads, 1)

    def test_thread_pool_cached(self):
        """Test the pool is shared while the thread count is unchanged"""
        first = get_executor(get_test_config(threads=3))
        second = get_executor(get_test_config(threads=3))

        self.assertIsInstance(first, ThreadPoolAdapter)
        self.assertIs(first, second)

    def test_one_pool_per_thread_count(self):
        """Test each thread count gets its own executor"""
        first = get_executor(get_test_config(threads=2))
        second = get_executor(get_test_config(threads=4))

        self.assertIsNot(first, second)
        self.assertEqual(first.threads, 2)
        self.assertEqual(second.threads, 4)
        self.assertIs(get_executor(get_test_config(threads=2)), first)

    def test_other_thread_count_leaves_pool_usable(self):
        """Test asking for another thread count does not shut down a pool in use"""
        first = get_executor(get_test_config(threads=2))
        get_executor(get_test_config(threads=4))

        self.assertEqual(first.map(lambda x: x + 1, range(10)), list(range(1, 11)))

    def test_map_preserves_order(self):
        """Test results come back in submission order"""
        for threads in (1, 4):
            executor = get_executor(get_test_config(threads=threads))
            self.assertEqual(executor.map(lambda x: x * x, range(50)), [x * x for x in range(50)])

    def test_reset(self):
        """Test reset_executor forgets the cached pool"""
        first = get_executor(get_test_config(threads=2))
        reset_executor()
        second = get_executor(get_test_config(threads=2))

        self.assertIsNot(first, second)

    def test_invalid_thread_count(self):
        """Test ThreadPoolAdapter rejects zero threads"""
        with self.assertRaises(ValueError):
            ThreadPoolAdapter(0)


if __name__ == '__main__':
    unittest.main()
