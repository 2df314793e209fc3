"""
kcc-jacobi - Entry point
Run this file to use the command line: python run.py [analyze|trajectory|deviation|sweep] ...
"""
import sys
import os
import logging
from logging.handlers import RotatingFileHandler

# Add project root to path
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from config import settings


def setup_logging():
    """Configure logging to file and console (stderr, so stdout carries data)."""
    root_logger = logging.getLogger()
    if getattr(root_logger, "_kcc_configured", False):
        return logging.getLogger('kcc')

    # Create logs directory
    logs_dir = settings.log_dir
    if not os.path.isabs(logs_dir):
        logs_dir = os.path.join(os.path.dirname(os.path.abspath(__file__)), logs_dir)
    os.makedirs(logs_dir, exist_ok=True)

    log_file = os.path.join(logs_dir, settings.log_file)
    level = settings.effective_log_level

    # Create formatter
    formatter = logging.Formatter(
        '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )

    # File handler with rotation (5MB, keep 5 files)
    file_handler = RotatingFileHandler(
        log_file,
        maxBytes=5 * 1024 * 1024,
        backupCount=5,
        encoding='utf-8'
    )
    file_handler.setLevel(level)
    file_handler.setFormatter(formatter)

    # Console handler
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(level)
    console_handler.setFormatter(formatter)

    # Configure root logger
    root_logger.setLevel(level)
    root_logger.addHandler(file_handler)
    root_logger.addHandler(console_handler)
    root_logger._kcc_configured = True

    return logging.getLogger('kcc')


def main():
    """Main entry point."""
    logger = setup_logging()
    logger.info("kcc-jacobi " + " ".join(sys.argv[1:]))

    from cli import cli
    cli(prog_name="kcc-jacobi")


if __name__ == "__main__":
    main()
