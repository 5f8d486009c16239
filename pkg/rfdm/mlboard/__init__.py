import logging

try:
    from mlboardclient.api import client
except ImportError:
    client = None

LOG = logging.getLogger(__name__)

mlboard = None
mlboard_logging = None


def _connect():
    global mlboard, mlboard_logging
    if mlboard_logging is not None:
        return mlboard_logging
    mlboard_logging = False
    if client:
        mlboard = client.Client()
        try:
            mlboard.apps.get()
        except Exception:
            LOG.debug('Do not use mlboard parameters logging.')
        else:
            LOG.info('Using mlboard parameters logging.')
            mlboard_logging = True
    return mlboard_logging


def update_task_info(data):
    """Push experiment results to the tracking server when one is reachable."""
    if _connect():
        mlboard.update_task_info(data)
