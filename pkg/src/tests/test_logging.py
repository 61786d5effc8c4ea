"""
Tests for the logging setup.
"""
import logging
import sys
import unittest

from spectrasphere.utils.logging import setup_logging


class TestSetupLogging(unittest.TestCase):
    """Test cases for setup_logging."""

    def setUp(self):
        """Set up test fixtures."""
        root = logging.getLogger()
        self.saved = (root.level, list(root.handlers))
        self.addCleanup(self.restore)

    def restore(self):
        root = logging.getLogger()
        root.setLevel(self.saved[0])
        root.handlers[:] = self.saved[1]

    def test_defaults_to_info_on_stderr(self):
        """Without a level the root logger logs INFO to standard error."""
        setup_logging()
        root = logging.getLogger()
        self.assertEqual(root.level, logging.INFO)
        self.assertEqual(len(root.handlers), 1)
        self.assertIs(root.handlers[0].stream, sys.stderr)

    def test_explicit_level(self):
        """An explicit level replaces the previous configuration."""
        setup_logging()
        setup_logging(logging.DEBUG)
        self.assertEqual(logging.getLogger().level, logging.DEBUG)
        self.assertEqual(len(logging.getLogger().handlers), 1)

    def test_worker_pool_logging_is_quiet(self):
        """joblib only reports warnings and above."""
        setup_logging(logging.DEBUG)
        self.assertEqual(logging.getLogger('joblib').level, logging.WARNING)


if __name__ == '__main__':
    unittest.main()
