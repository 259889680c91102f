"""
证书文件
把 NestedIntervalCertificate 写成 JSON（扩展名 .cert），所有有理数以 "p/q" 字符串精确保存
"""

import json
import logging
from fractions import Fraction

from mpmath import mp

from config import config
from errors import ConfigError
from numtheory import PsiFunction, to_fraction, to_mpf
import direction_sets as ds
import schedules
from angle_search import (AngleWindow, Exclusion, InequalityCheck, NestedIntervalCertificate,
                          SlopeInterval, StageRecord)
from storage.tables import read_json, write_json

logger = logging.getLogger(__name__)

FORMAT = "rotlattice-certificate"
VERSION = 1


def _exact(x) -> str:
    """mpf 精确转成二进有理数字符串"""
    return str(to_fraction(x))


def _psi_to_dict(psi: PsiFunction) -> dict:
    return {"kind": psi.kind, "C": str(psi.C), "exponent": str(psi.exponent),
            "breakpoints": list(psi.breakpoints), "values": [str(v) for v in psi.values]}


def _psi_from_dict(data: dict) -> PsiFunction:
    return PsiFunction(data["kind"], Fraction(data["C"]), Fraction(data["exponent"]),
                       tuple(int(b) for b in data["breakpoints"]),
                       tuple(Fraction(v) for v in data["values"]))


def _stage_to_dict(stage: StageRecord) -> dict:
    data = {
        "n": stage.n,
        "interval": stage.interval.to_pair(),
        "covering_count": stage.covering_count,
        "exclusions": [[e.index, e.p, e.q, str(e.lo), str(e.hi)] for e in stage.exclusions],
    }
    if stage.check is not None:
        data["check"] = {"ok1": stage.check.ok1, "ok2": stage.check.ok2,
                         "slack": _exact(stage.check.slack)}
    return data


def _stage_from_dict(data: dict) -> StageRecord:
    check = None
    if "check" in data:
        c = data["check"]
        check = InequalityCheck(bool(c["ok1"]), bool(c["ok2"]), to_mpf(Fraction(c["slack"])))
    exclusions = [Exclusion(int(i), int(p), int(q), Fraction(lo), Fraction(hi))
                  for i, p, q, lo, hi in data.get("exclusions", [])]
    return StageRecord(int(data["n"]), SlopeInterval.from_pair(data["interval"]),
                       exclusions, check, int(data.get("covering_count", 0)))


def certificate_to_dict(cert: NestedIntervalCertificate) -> dict:
    w = cert.window
    return {
        "format": FORMAT,
        "version": VERSION,
        "slope": str(cert.slope),
        "schedule": cert.schedule.to_dict(),
        "omega": cert.omega.to_dict(),
        "window": {"lo": _exact(w.lo), "hi": _exact(w.hi), "alpha": _exact(w.alpha),
                   "lipschitz": str(w.lipschitz)},
        "c_deriv": str(cert.c_deriv),
        "cap": cert.cap,
        "global_constant": None if cert.global_constant is None else _exact(cert.global_constant),
        "psi": None if cert.psi is None else _psi_to_dict(cert.psi),
        "chain": [_stage_to_dict(s) for s in cert.chain],
    }


def certificate_from_dict(data: dict) -> NestedIntervalCertificate:
    if data.get("format") != FORMAT:
        raise ConfigError(f"不是证书文件（format={data.get('format')!r}）")
    if data.get("version") != VERSION:
        raise ConfigError(f"不支持的证书版本 {data.get('version')!r}")
    try:
        with mp.workprec(config.precision):
            w = data["window"]
            window = AngleWindow(to_mpf(Fraction(w["lo"])), to_mpf(Fraction(w["hi"])),
                                 to_mpf(Fraction(w["alpha"])), Fraction(w["lipschitz"]))
            constant = data.get("global_constant")
            cert = NestedIntervalCertificate(
                schedule=schedules.from_dict(data["schedule"]),
                omega=ds.from_dict(data["omega"]),
                window=window,
                c_deriv=Fraction(data["c_deriv"]),
                chain=[_stage_from_dict(s) for s in data["chain"]],
                global_constant=None if constant is None else to_mpf(Fraction(constant)),
                psi=None if data.get("psi") is None else _psi_from_dict(data["psi"]),
                cap=data.get("cap", ""),
            )
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as e:
        raise ConfigError(f"证书文件内容无效: {e}") from e
    if not cert.chain:
        raise ConfigError("证书没有任何阶段")
    if str(cert.slope) != data.get("slope"):
        raise ConfigError("证书的 slope 与区间链不一致")
    return cert


def save_certificate(cert: NestedIntervalCertificate, path: str) -> str:
    write_json(path, certificate_to_dict(cert))
    logger.info("证书已写入 %s", path)
    return path


def load_certificate(path: str) -> NestedIntervalCertificate:
    try:
        data = read_json(path)
    except (json.JSONDecodeError, IOError) as e:
        raise ConfigError(f"无法读取证书 {path}: {e}") from e
    return certificate_from_dict(data)
