"""
Logging configuration for spectrasphere.
"""
import logging
import sys

def setup_logging(level=None):
    """
    Set up basic logging configuration.

    Progress and warnings go to standard error so that standard output and
    the result files stay clean for scripting.

    Args:
        level: Logging level (defaults to INFO if None)
    """
    if level is None:
        level = logging.INFO

    logging.basicConfig(
        level=level,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=[
            logging.StreamHandler(sys.stderr)
        ],
        force=True
    )

    # Set joblib logging to WARNING to reduce noise from worker pools
    logging.getLogger('joblib').setLevel(logging.WARNING)

    logging.info(f"Logging configured with level {logging.getLevelName(level)}")
