"""Flat ``key=value`` configuration files.

Keys are dotted (``tdma.slot_duration_s=0.01``), ``#`` starts a comment line,
lists are comma separated and paths are resolved against the config file's
directory. Unknown keys are rejected.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, Optional, Tuple

from .linkbudget import (
    CALIBRATION_DISTANCE_KM,
    CALIBRATION_SNR_DB,
    LinkBudgetParams,
    calibrate_tx_power,
)
from .mobility import Position, TraceFormatError, parse_mobility_trace
from .radio import RadioConfig, default_table, parse_snr_table
from .scenario import GROUND_STATION, ScenarioConfig, TrafficBinding, ValidationSettings
from .tdma import TdmaConfig
from .tracegen import FlightParams, OcaRegion
from .traffic import DEFAULT_PAYLOAD_BYTES, parse_message_trace


class ConfigError(ValueError):
    def __init__(self, message: str, source: Optional[str] = None, line: Optional[int] = None):
        prefix = ""
        if source is not None:
            prefix = f"{source}:{line}: " if line is not None else f"{source}: "
        super().__init__(prefix + message)
        self.source = source
        self.line = line


def _real(s: str) -> float:
    return float(s)


def _int(s: str) -> int:
    return int(s)


def _bool(s: str) -> bool:
    v = s.lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _list(item: Callable[[str], Any]) -> Callable[[str], tuple]:
    def parse(s: str) -> tuple:
        return tuple(item(p.strip()) for p in s.split(",") if p.strip())

    return parse


def _str(s: str) -> str:
    return s


_PATH = "path"

# key -> (parser, default); None default means optional with no value
SCHEMA: Dict[str, Tuple[Any, Any]] = {
    "sim.end_s": (_real, 10000.0),
    "sim.runs": (_int, 10),
    "sim.base_seed": (_int, 1),
    "sim.user_counts": (_list(_int), (100, 200, 300, 400, 500)),
    "tdma.slot_duration_s": (_real, 0.01),
    "tdma.slots_per_frame": (_int, 10),
    "tdma.retransmission_attempts": (_int, 0),
    "radio.range_km": (_real, 400.0),
    "radio.snr_table": (_PATH, None),
    "link.p_tx_dbm": (_real, None),
    "link.g_tx_dbi": (_real, 0.0),
    "link.l_tx_db": (_real, 0.0),
    "link.g_rx_dbi": (_real, 0.0),
    "link.l_rx_db": (_real, 0.0),
    "link.f_mhz": (_real, 968.0),
    "link.noise_figure_db": (_real, 6.0),
    "link.n0_dbm_hz": (_real, -174.0),
    "link.bandwidth_hz": (_real, 500e3),
    "link.calibration_distance_km": (_real, CALIBRATION_DISTANCE_KM),
    "link.calibration_snr_db": (_real, CALIBRATION_SNR_DB),
    "oca.center_x_km": (_real, 0.0),
    "oca.center_y_km": (_real, 0.0),
    "oca.center_z_km": (_real, 0.0001),
    "oca.range_km": (_real, 370.4),
    "mobility.source": (_str, "synthetic"),
    "mobility.file": (_PATH, None),
    "mobility.corridor_km": (_real, 600.0),
    "mobility.speed_kms": (_real, 0.25),
    "mobility.altitude_km": (_real, 10.0),
    "mobility.margin_km": (_real, 100.0),
    "mobility.offset_fraction": (_real, 0.9),
    "traffic.payload_bytes": (_int, DEFAULT_PAYLOAD_BYTES),
    "traffic.manifest": (_PATH, None),
    "validate.distances_km": (_list(_real), ValidationSettings().distances_km),
    "validate.packets": (_int, 10000),
    "validate.seed": (_int, 1),
    "validate.range_km": (_real, 1500.0),
}


@dataclass
class ConfigDocument:
    values: Dict[str, Any]
    lines: Dict[str, int]
    source: Optional[str] = None
    base_dir: Path = Path(".")

    def get(self, key: str) -> Any:
        if key in self.values:
            return self.values[key]
        return SCHEMA[key][1]

    def has(self, key: str) -> bool:
        return key in self.values

    def error(self, key: str, message: str) -> ConfigError:
        return ConfigError(f"{key}: {message}", self.source, self.lines.get(key))


def parse_config_text(text: str, source: Optional[str] = None, base_dir: Path | str = ".",
                      allowed: Optional[set] = None) -> ConfigDocument:
    values: Dict[str, Any] = {}
    lines: Dict[str, int] = {}
    base = Path(base_dir)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"expected key=value, got {line!r}", source, lineno)
        key, _, value = (part.strip() for part in line.partition("="))
        if key not in SCHEMA or (allowed is not None and key not in allowed):
            raise ConfigError(f"unknown key {key!r}", source, lineno)
        if key in values:
            raise ConfigError(f"duplicate key {key!r} (first on line {lines[key]})", source, lineno)
        parser = SCHEMA[key][0]
        if parser == _PATH:
            if not value:
                raise ConfigError(f"{key}: empty path", source, lineno)
            parsed: Any = (base / value) if not Path(value).is_absolute() else Path(value)
        else:
            try:
                parsed = parser(value)
            except ValueError as exc:
                raise ConfigError(f"{key}: bad value {value!r} ({exc})", source, lineno) from None
        values[key] = parsed
        lines[key] = lineno
    return ConfigDocument(values, lines, source, base)


def load_document(path, allowed: Optional[set] = None) -> ConfigDocument:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc.strerror}", str(p)) from None
    return parse_config_text(text, str(p), p.parent, allowed)


def _read(doc: ConfigDocument, key: str, path: Path) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise doc.error(key, f"cannot read {path}: {exc.strerror}") from None


def link_params(doc: ConfigDocument) -> LinkBudgetParams:
    try:
        params = LinkBudgetParams(
            p_tx=doc.get("link.p_tx_dbm") or 0.0,
            g_tx=doc.get("link.g_tx_dbi"),
            l_tx=doc.get("link.l_tx_db"),
            g_rx=doc.get("link.g_rx_dbi"),
            l_rx=doc.get("link.l_rx_db"),
            f=doc.get("link.f_mhz"),
            f_n=doc.get("link.noise_figure_db"),
            n0=doc.get("link.n0_dbm_hz"),
            b=doc.get("link.bandwidth_hz"),
        )
    except ValueError as exc:
        raise ConfigError(str(exc), doc.source) from None
    if not doc.has("link.p_tx_dbm"):
        params = calibrate_tx_power(
            params, doc.get("link.calibration_snr_db"), doc.get("link.calibration_distance_km")
        )
    return params


def _load_manifest(doc: ConfigDocument, path: Path, payload: int):
    text = _read(doc, "traffic.manifest", path)
    bindings = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#") or line.startswith("node,"):
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) not in (2, 3, 4):
            raise ConfigError("expected node,trace_file[,destination[,payload_bytes]]", str(path), lineno)
        try:
            node = int(parts[0])
            dest: Any = GROUND_STATION
            if len(parts) >= 3 and parts[2] and parts[2] != GROUND_STATION:
                dest = int(parts[2])
            size = int(parts[3]) if len(parts) == 4 else payload
        except ValueError as exc:
            raise ConfigError(f"bad manifest row ({exc})", str(path), lineno) from None
        trace_path = Path(parts[1])
        if not trace_path.is_absolute():
            trace_path = path.parent / trace_path
        try:
            trace_text = trace_path.read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read message trace {trace_path}: {exc.strerror}", str(path), lineno) from None
        try:
            trace = parse_message_trace(trace_text, str(trace_path))
        except TraceFormatError as exc:
            raise ConfigError(str(exc)) from None
        bindings.append(TrafficBinding(node, trace, dest, size))
    return tuple(bindings)


def scenario_from_document(doc: ConfigDocument) -> ScenarioConfig:
    try:
        if doc.has("radio.snr_table"):
            p = doc.get("radio.snr_table")
            table = parse_snr_table(_read(doc, "radio.snr_table", p), str(p))
        else:
            table = default_table()
        radio = RadioConfig(doc.get("radio.range_km"), table, link_params(doc))
        tdma = TdmaConfig(
            doc.get("tdma.slot_duration_s"),
            doc.get("tdma.slots_per_frame"),
            doc.get("tdma.retransmission_attempts"),
        )
        oca = OcaRegion(
            Position(doc.get("oca.center_x_km"), doc.get("oca.center_y_km"), doc.get("oca.center_z_km")),
            doc.get("oca.range_km"),
        )
        flights = FlightParams(
            doc.get("mobility.corridor_km"),
            doc.get("mobility.speed_kms"),
            doc.get("mobility.altitude_km"),
            doc.get("mobility.margin_km"),
            doc.get("mobility.offset_fraction"),
        )
        payload = doc.get("traffic.payload_bytes")
        source = doc.get("mobility.source")
        mobility = bindings = None
        if source == "file":
            if not doc.has("mobility.file"):
                raise doc.error("mobility.source", "file source needs mobility.file")
            if not doc.has("traffic.manifest"):
                raise doc.error("mobility.source", "file source needs traffic.manifest")
            mpath = doc.get("mobility.file")
            mobility = parse_mobility_trace(_read(doc, "mobility.file", mpath), str(mpath))
            bindings = _load_manifest(doc, doc.get("traffic.manifest"), payload)
        elif source != "synthetic":
            raise doc.error("mobility.source", f"must be 'synthetic' or 'file', got {source!r}")
        user_counts = doc.get("sim.user_counts")
        if mobility is not None and not doc.has("sim.user_counts"):
            user_counts = (len(mobility),)
        validation = ValidationSettings(
            doc.get("validate.distances_km"),
            doc.get("validate.packets"),
            doc.get("validate.seed"),
            doc.get("validate.range_km"),
        )
        return ScenarioConfig(
            user_counts=tuple(user_counts),
            tdma=tdma,
            radio=radio,
            oca=oca,
            flights=flights,
            mobility=mobility,
            bindings=bindings,
            payload_size=payload,
            sim_end=doc.get("sim.end_s"),
            runs=doc.get("sim.runs"),
            base_seed=doc.get("sim.base_seed"),
            validation=validation,
        )
    except ConfigError:
        raise
    except TraceFormatError as exc:
        raise ConfigError(str(exc)) from None
    except ValueError as exc:
        raise ConfigError(str(exc), doc.source) from None


def load_scenario(path) -> ScenarioConfig:
    return scenario_from_document(load_document(path))
