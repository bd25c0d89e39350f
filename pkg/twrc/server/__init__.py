from asyncio import Event

import uvloop
from aiohttp import web
from aiohttp.web import Application

from twrc import __version__, LOGGER
from twrc.server.routes import routes


async def web_server():
    web_app = Application(client_max_size=1024 * 1024)
    web_app.add_routes(routes)
    return web_app


async def start_services(host: str, port: int):
    LOGGER.info(f"Initializing twrc v-{__version__}")
    server = web.AppRunner(await web_server())
    await server.setup()
    await web.TCPSite(server, host, port).start()
    LOGGER.info(f"API server listening on {host}:{port}")
    try:
        await Event().wait()
    finally:
        await server.cleanup()


def run_server(host: str, port: int):
    loop = uvloop.new_event_loop()
    try:
        loop.run_until_complete(start_services(host, port))
    except KeyboardInterrupt:
        LOGGER.info("Service Stopping...")
    finally:
        loop.close()
