from os import getenv
from logging import getLogger, FileHandler, StreamHandler, ERROR, basicConfig

handlers = [StreamHandler()]
if log_file := getenv("TWRC_LOG_FILE", ""):
    handlers.append(FileHandler(log_file))

basicConfig(format="[%(asctime)s] [%(levelname)s] - %(message)s",
            datefmt="%d-%b-%y %I:%M:%S %p",
            handlers=handlers,
            level=getenv("TWRC_LOG_LEVEL", "WARNING").upper())

getLogger("aiohttp").setLevel(ERROR)
getLogger("aiohttp.web").setLevel(ERROR)

LOGGER = getLogger(__name__)

__version__ = "1.0.0"
