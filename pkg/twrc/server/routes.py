from asyncio import get_running_loop
from functools import partial, wraps

from aiohttp import web

from twrc import __version__, LOGGER
from twrc.cli.commands import member_document, parse_fixed, slice_document
from twrc.config import Settings
from twrc.helper.exceptions import TwrcError
from twrc.helper.gap_certifier import certify_tuple
from twrc.helper.protocol_sim import ser_curve
from twrc.helper.regions import REGIONS, ChannelConfig, RateTuple, boundary_slice, region_member
from twrc.helper.utils import json_dumps, parse_float, parse_float_list, parse_seed, parse_tuple, versioned

routes = web.RouteTableDef()


def _json(document: dict, status: int = 200) -> web.Response:
    return web.json_response(document, status=status, dumps=json_dumps)


def api(handler):
    """Bad query parameters and domain errors become 400 responses."""
    @wraps(handler)
    async def wrapper(request):
        try:
            return _json(await handler(request))
        except (TwrcError, KeyError, ValueError) as e:
            detail = e.detail if isinstance(e, TwrcError) else f"bad parameter: {e}"
            LOGGER.info(f"{request.path}: {detail}")
            return _json(versioned({"error": detail}), status=400)
    return wrapper


async def _offload(fn, *args, **kwargs):
    return await get_running_loop().run_in_executor(None, partial(fn, *args, **kwargs))


def _channel(query, pr_default=None) -> ChannelConfig:
    def value(name):
        if name not in query and pr_default is not None and name.startswith("pr"):
            return pr_default
        return parse_float(query[name], name)
    values = [value(name) for name in ("p1", "p2", "pr1", "pr2")]
    if query.get("db", "").lower() in ("1", "true", "yes"):
        return ChannelConfig.from_db(*values)
    return ChannelConfig(*values)


def _optional(query, name, parse):
    return parse(query[name]) if name in query else None


@routes.get("/api/status")
async def status_route(request):
    return _json(versioned({"service": "twrc", "version": __version__}))


@routes.get("/api/region/member")
@api
async def region_member_route(request):
    query = request.query
    region = query["region"]
    if region not in REGIONS:
        raise KeyError(f"region must be one of {', '.join(REGIONS)}")
    cfg, r = _channel(query), RateTuple(*parse_tuple(query["tuple"]))
    report = await _offload(region_member, region, cfg, r, _optional(query, "tolerance", parse_float),
                            _optional(query, "grid_k", int))
    return member_document(cfg, r, report)


@routes.get("/api/region/slice")
@api
async def region_slice_route(request):
    query = request.query
    cfg = _channel(query)
    axes = tuple(a.strip() for a in query.get("axes", "r12,r21").split(","))
    regions = tuple(r.strip() for r in query.get("regions", ",".join(REGIONS)).split(",") if r.strip())
    result = await _offload(boundary_slice, cfg, parse_fixed(query.get("fixed"), axes), axes,
                            int(query.get("resolution", 16)), regions,
                            _optional(query, "tolerance", parse_float),
                            grid_k=_optional(query, "grid_k", int))
    return slice_document(cfg, result)


@routes.get("/api/gap/witness")
@api
async def gap_witness_route(request):
    query = request.query
    cfg, r = _channel(query, pr_default=0.0), RateTuple(*parse_tuple(query["tuple"]))
    witness = await _offload(certify_tuple, cfg, r, parse_float(query.get("shift", 0.5)),
                             _optional(query, "tolerance", parse_float))
    return versioned({"command": "gap witness", "cfg": cfg.to_dict(), "tuple": r.to_dict(), **witness.to_dict()})


@routes.get("/api/sim/ser")
@api
async def sim_ser_route(request):
    query = request.query
    cfg = _channel({"p1": "1", "p2": "100", "pr1": "100", "pr2": "100", **query})
    q, n = int(query["q"]), int(query["n"])
    seed = parse_seed(query["seed"]) if "seed" in query else Settings.seed()
    points = await _offload(ser_curve, cfg, q, n, parse_float_list(query["snrs"]),
                            int(query.get("trials", 1000)), seed)
    return versioned({"command": "sim ser", "cfg": cfg.to_dict(), "q": q, "n": n,
                      "points": [p.to_dict() for p in points]})
