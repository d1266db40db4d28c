"""Scenario configuration files.

Grammar: UTF-8 lines; ``#`` starts a comment; ``[name]`` or ``[line.NAME]``
opens a section; entries are ``key = value``. Recognised sections::

    [scenario]  n_sim, n_margin, reps, seed, levels (comma separated)
    [line.X]    lognormal_mu, lognormal_sigma, threshold_u, gpd_beta, gpd_xi,
                negbin_alpha, negbin_r
    [copula]    family, rho, nu, theta
    [pt]        enabled, gpd_rho, threshold_mode (marginal|explicit), y

Line sections keep their file order. Unknown sections or keys, duplicates
and malformed numbers are reported with their line (and column).
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from .copulas import FAMILIES, CopulaModel
from .loss_model import DEFAULT_LEVELS, BusinessLine, PlainJoint, PtJoint, Scenario

_NUMBER = re.compile(r"[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?")
_SECTION = re.compile(r"\[\s*([A-Za-z_][\w]*(\.[\w-]+)?)\s*\]")
_KEY = re.compile(r"[A-Za-z_]\w*")

LINE_KEYS = ("lognormal_mu", "lognormal_sigma", "threshold_u", "gpd_beta", "gpd_xi", "negbin_alpha", "negbin_r")
SCHEMA = {
    "scenario": {"n_sim", "n_margin", "reps", "seed", "levels"},
    "copula": {"family", "rho", "nu", "theta"},
    "pt": {"enabled", "gpd_rho", "threshold_mode", "y"},
}
DEFAULT_REPS = 50


class ConfigError(ValueError):
    def __init__(self, message: str, source: str = "<config>", line: int | None = None, column: int | None = None):
        where = source
        if line is not None:
            where += f":{line}"
            if column is not None:
                where += f":{column}"
        super().__init__(f"{where}: {message}")
        self.line = line
        self.column = column


@dataclass
class Entry:
    value: str
    line: int
    column: int


@dataclass
class ConfigDocument:
    sections: dict[str, dict[str, Entry]] = field(default_factory=dict)
    section_lines: dict[str, int] = field(default_factory=dict)
    source: str = "<config>"

    def error(self, message: str, section: str | None = None, key: str | None = None) -> ConfigError:
        line = col = None
        if section is not None and key is not None and key in self.sections.get(section, {}):
            e = self.sections[section][key]
            line, col = e.line, e.column
        elif section is not None:
            line = self.section_lines.get(section)
        return ConfigError(message, self.source, line, col)

    @property
    def line_sections(self) -> list[str]:
        return [s for s in self.sections if s.startswith("line.")]


def parse_config(text: bytes | str, source: str = "<config>") -> ConfigDocument:
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ConfigError(f"not valid UTF-8 ({exc.reason} at byte {exc.start})", source) from None
    doc = ConfigDocument(source=source)
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        stripped = body.strip()
        if not stripped:
            continue
        col = len(body) - len(body.lstrip()) + 1
        if stripped.startswith("["):
            m = _SECTION.fullmatch(stripped)
            if m is None:
                raise ConfigError(f"malformed section header {stripped!r}", source, lineno, col)
            name = m.group(1)
            if name in doc.sections:
                raise ConfigError(f"duplicate section [{name}]", source, lineno, col)
            if name not in SCHEMA and not name.startswith("line."):
                raise ConfigError(f"unknown section [{name}]", source, lineno, col)
            doc.sections[name] = {}
            doc.section_lines[name] = lineno
            current = name
            continue
        if "=" not in stripped:
            raise ConfigError("expected 'key = value'", source, lineno, col)
        key, value = (part.strip() for part in stripped.split("=", 1))
        if not _KEY.fullmatch(key):
            raise ConfigError(f"invalid key {key!r}", source, lineno, col)
        if current is None:
            raise ConfigError(f"key {key!r} outside any section", source, lineno, col)
        allowed = LINE_KEYS if current.startswith("line.") else SCHEMA[current]
        if key not in allowed:
            raise ConfigError(f"unknown key {key!r} in [{current}]", source, lineno, col)
        if key in doc.sections[current]:
            raise ConfigError(f"duplicate key {key!r} in [{current}]", source, lineno, col)
        if not value:
            raise ConfigError(f"empty value for {key!r}", source, lineno, col)
        after = raw.index("=") + 1
        value_col = after + len(raw[after:]) - len(raw[after:].lstrip()) + 1
        doc.sections[current][key] = Entry(value, lineno, value_col)
    return doc


# typed accessors


def _number(doc, section, key, default=None, *, integer=False, required=False):
    entry = doc.sections.get(section, {}).get(key)
    if entry is None:
        if required:
            raise doc.error(f"missing required key {key!r}", section)
        return default
    if not _NUMBER.fullmatch(entry.value):
        raise doc.error(f"{key} must be a decimal number, got {entry.value!r}", section, key)
    value = float(entry.value)
    if integer:
        if value != int(value):
            raise doc.error(f"{key} must be an integer, got {entry.value!r}", section, key)
        return int(value)
    return value


def _number_list(doc, section, key, default=None):
    entry = doc.sections.get(section, {}).get(key)
    if entry is None:
        return default
    parts = [p.strip() for p in entry.value.split(",")]
    if not parts or any(not _NUMBER.fullmatch(p) for p in parts):
        raise doc.error(f"{key} must be a comma-separated list of numbers, got {entry.value!r}", section, key)
    return tuple(float(p) for p in parts)


def _text(doc, section, key, default=None):
    entry = doc.sections.get(section, {}).get(key)
    return default if entry is None else entry.value


def _boolean(doc, section, key, default=False):
    entry = doc.sections.get(section, {}).get(key)
    if entry is None:
        return default
    v = entry.value.lower()
    if v in ("true", "yes", "on", "1"):
        return True
    if v in ("false", "no", "off", "0"):
        return False
    raise doc.error(f"{key} must be true or false, got {entry.value!r}", section, key)


def _guard(doc, section, key, ok: bool, message: str):
    if not ok:
        raise doc.error(message, section, key)


@dataclass(frozen=True)
class RunConfig:
    scenario: Scenario
    reps: int


def copula_from_config(doc: ConfigDocument, dim: int) -> CopulaModel:
    if "copula" not in doc.sections:
        raise ConfigError("missing section [copula]", doc.source)
    family = _text(doc, "copula", "family")
    if family is None:
        raise doc.error("missing required key 'family'", "copula")
    _guard(doc, "copula", "family", family in FAMILIES, f"unknown copula family {family!r}; expected one of {FAMILIES}")
    rho = _number(doc, "copula", "rho")
    nu = _number(doc, "copula", "nu")
    theta = _number(doc, "copula", "theta")
    needs = {"gaussian": ("rho",), "t": ("rho", "nu"), "clayton": ("theta",), "frank": ("theta",), "gumbel": ("theta",)}
    given = {"rho": rho, "nu": nu, "theta": theta}
    for key in needs.get(family, ()):
        if given[key] is None:
            raise doc.error(f"{family} copula needs {key!r}", "copula")
    for key, value in given.items():
        if value is not None and key not in needs.get(family, ()):
            raise doc.error(f"{key!r} does not apply to the {family} copula", "copula", key)
    try:
        if family == "independence":
            return CopulaModel.independence(dim)
        if family == "gaussian":
            return CopulaModel.gaussian(rho, dim=dim)
        if family == "t":
            return CopulaModel.student_t(rho, nu, dim=dim)
        return CopulaModel(family, dim, theta=theta)
    except ValueError as exc:
        raise doc.error(str(exc), "copula") from None


def _line_from_config(doc: ConfigDocument, section: str) -> BusinessLine:
    values = {key: _number(doc, section, key, required=True) for key in LINE_KEYS}
    for key in LINE_KEYS:
        if key != "lognormal_mu":
            _guard(doc, section, key, values[key] > 0, f"{key} must be > 0, got {values[key]:g}")
    return BusinessLine.from_parameters(
        section.split(".", 1)[1],
        mu=values["lognormal_mu"], sigma=values["lognormal_sigma"], u=values["threshold_u"],
        beta=values["gpd_beta"], xi=values["gpd_xi"], alpha=values["negbin_alpha"], r=values["negbin_r"],
    )


def scenario_from_config(doc: ConfigDocument, seed_override: int | None = None) -> RunConfig:
    """Validate the whole document and build a runnable scenario."""
    if "scenario" not in doc.sections:
        raise ConfigError("missing section [scenario]", doc.source)
    names = doc.line_sections
    if len(names) < 2:
        raise ConfigError(f"need at least two [line.NAME] sections, found {len(names)}", doc.source)
    lines = tuple(_line_from_config(doc, s) for s in names)
    copula = copula_from_config(doc, len(lines))

    n_sim = _number(doc, "scenario", "n_sim", 10_000, integer=True)
    n_margin = _number(doc, "scenario", "n_margin", 10**6, integer=True)
    reps = _number(doc, "scenario", "reps", DEFAULT_REPS, integer=True)
    seed = _number(doc, "scenario", "seed", 0, integer=True)
    levels = _number_list(doc, "scenario", "levels", DEFAULT_LEVELS)
    _guard(doc, "scenario", "n_sim", n_sim >= 1, "n_sim must be >= 1")
    _guard(doc, "scenario", "n_margin", n_margin >= 1, "n_margin must be >= 1")
    _guard(doc, "scenario", "reps", reps >= 1, "reps must be >= 1")
    _guard(doc, "scenario", "seed", seed >= 0, "seed must be non-negative")
    _guard(doc, "scenario", "levels", all(0 < a < 1 for a in levels) and all(a < b for a, b in zip(levels, levels[1:])),
           "levels must be strictly increasing inside (0, 1)")
    if seed_override is not None:
        seed = seed_override

    joint = PlainJoint(copula)
    if "pt" in doc.sections and _boolean(doc, "pt", "enabled", True):
        mode = _text(doc, "pt", "threshold_mode", "marginal")
        _guard(doc, "pt", "threshold_mode", mode in ("marginal", "explicit"),
               f"threshold_mode must be 'marginal' or 'explicit', got {mode!r}")
        y = _number_list(doc, "pt", "y")
        if mode == "explicit":
            if y is None:
                raise doc.error("threshold_mode = explicit requires y", "pt", "threshold_mode")
            _guard(doc, "pt", "y", len(y) == len(lines), f"y needs {len(lines)} components, got {len(y)}")
        elif y is not None:
            raise doc.error("y is only allowed with threshold_mode = explicit", "pt", "y")
        gpd_rho = _number(doc, "pt", "gpd_rho", 0.7)
        _guard(doc, "pt", "gpd_rho", 0 <= gpd_rho < 1, f"gpd_rho must lie in [0, 1), got {gpd_rho:g}")
        try:
            joint = PtJoint(copula, gpd_rho=gpd_rho, threshold_mode=mode, y=y)
        except ValueError as exc:
            raise doc.error(str(exc), "pt") from None
    try:
        scenario = Scenario(lines, joint, n_sim=n_sim, n_margin=n_margin, seed=seed, levels=levels)
    except ValueError as exc:
        raise ConfigError(str(exc), doc.source) from None
    return RunConfig(scenario, reps)


def load_config(path, seed_override: int | None = None) -> RunConfig:
    with open(path, "rb") as fh:
        doc = parse_config(fh.read(), source=str(path))
    return scenario_from_config(doc, seed_override)
