import logging
import os
import unittest
from unittest.mock import patch

import numpy as np

from stemfill.solver import SolverConfig
from stemfill.utilities.dotenv import EnvLoader, env
from stemfill.utilities.logger import CustomFormatter, setup_logger
from stemfill.utilities.rng import STREAMS, generator, stream_key
from stemfill.utilities.timing import Stopwatch
from tests.helpers import make_temp_dir, temp_path


class TestRandomStreams(unittest.TestCase):
    def test_streams_are_independent(self):
        keys = {stream_key(3, stream) for stream in STREAMS}
        self.assertEqual(len(keys), len(STREAMS))

    def test_same_key_same_draws(self):
        a = generator(11, "noise").standard_normal(5)
        b = generator(11, "noise").standard_normal(5)
        np.testing.assert_array_equal(a, b)

    def test_unknown_stream(self):
        with self.assertRaises(ValueError):
            generator(0, "weather")

    def test_negative_seed(self):
        with self.assertRaises(ValueError):
            stream_key(-1, "mask")


class TestEnvLoader(unittest.TestCase):
    def test_singleton(self):
        self.assertIs(EnvLoader(), env)

    def test_process_environment_wins(self):
        with patch.dict(os.environ, {"STEMFILL_MAX_ITERS": "42"}):
            self.assertEqual(env.get("STEMFILL_MAX_ITERS", cast_type=int), 42)
            self.assertEqual(SolverConfig().max_iters, 42)

    def test_defaults_and_casts(self):
        with patch.dict(os.environ, {"STEMFILL_FLAG": "yes"}):
            self.assertTrue(env.get("STEMFILL_FLAG", cast_type=bool))
        self.assertEqual(env.get("STEMFILL_UNSET_KEY", default=7), 7)
        with self.assertRaises(ValueError):
            env.get("STEMFILL_UNSET_KEY", required=True)

    def test_declared_settings(self):
        with patch.dict(os.environ, {"STEMFILL_REL_TOL": "1e-3"}):
            self.assertEqual(env.setting("STEMFILL_REL_TOL"), 1e-3)
        with self.assertRaises(KeyError):
            env.setting("STEMFILL_COLOUR")

    def test_bad_cast(self):
        with patch.dict(os.environ, {"STEMFILL_REL_TOL": "tiny"}):
            with self.assertRaises(ValueError):
                env.get("STEMFILL_REL_TOL", cast_type=float)

    def test_dotenv_file_is_parsed(self):
        path = temp_path(make_temp_dir(self), ".env")
        with open(path, "w") as f:
            f.write('# comment\nSTEMFILL_TEST_QUOTED="a b"\nSTEMFILL_TEST_PLAIN=3\nnoise\n')
        loader = object.__new__(EnvLoader)
        loader._env_vars = {}
        loader._load_dotenv(path)
        self.assertEqual(loader._env_vars, {"STEMFILL_TEST_QUOTED": "a b", "STEMFILL_TEST_PLAIN": "3"})


class TestLogger(unittest.TestCase):
    def test_handlers_attached_once(self):
        logger = setup_logger("stemfill.test.once")
        count = len(logger.handlers)
        setup_logger("stemfill.test.once")
        self.assertEqual(len(logger.handlers), count)

    def test_log_file(self):
        path = temp_path(make_temp_dir(self), "run.log")
        logger = setup_logger("stemfill.test.file", log_file=path)
        self.addCleanup(lambda: [h.close() for h in logger.handlers])
        logger.info("written")
        for handler in logger.handlers:
            handler.flush()
        with open(path) as f:
            self.assertIn("written", f.read())

    def test_debug_switch(self):
        with patch.dict(os.environ, {"STEMFILL_DEBUG": "1"}):
            logger = setup_logger("stemfill.test.debug")
        self.assertEqual(logger.level, logging.DEBUG)

    def test_plain_formatter(self):
        record = logging.LogRecord("x", logging.ERROR, __file__, 1, "boom", None, None)
        text = CustomFormatter(use_color=False).format(record)
        self.assertNotIn("\033[", text)
        self.assertIn("ERROR - boom", text)

    def test_formatter_colours_by_level(self):
        record = logging.LogRecord("x", logging.ERROR, __file__, 1, "boom", None, None)
        text = CustomFormatter().format(record)
        self.assertTrue(text.startswith("\033[91m"))
        self.assertIn("boom", text)


class TestStopwatch(unittest.TestCase):
    def test_elapsed(self):
        with Stopwatch() as watch:
            sum(range(1000))
        self.assertGreaterEqual(watch.elapsed, 0.0)
