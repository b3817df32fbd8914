"""
Physical parameters, unit conventions and derived scalar quantities.

Every frequency-like quantity is stored in rad/s. Config files quote
frequencies as ``value/2pi`` in Hz, and this module is the only place
that converts between the two conventions.
"""

import configparser
import dataclasses
import hashlib
import math
import re
from dataclasses import dataclass, field
from typing import Optional

__all__ = [
    "HBAR", "K_B", "TWO_PI", "SPIN_DENSITY_YIG", "GYROMAGNETIC_YIG",
    "ConfigError", "ConfigParseError",
    "DriveSpec", "SystemConfig", "SiteParams",
    "thermal_occupation", "spin_count", "rabi_frequency",
    "load_config", "loads_config", "dump_config", "config_hash",
    "baseline_config", "describe",
]

HBAR = 1.054571817e-34  # J s
K_B = 1.380649e-23  # J/K
TWO_PI = 2.0 * math.pi

SPIN_DENSITY_YIG = 4.22e27  # m^-3
GYROMAGNETIC_YIG = TWO_PI * 28e9  # rad/(s T)

# keys that may differ between the two sites
SITE_KEYS = (
    "omega_b", "delta_a", "delta_c", "delta_d",
    "kappa_a", "kappa_c", "kappa_d", "gamma_b",
    "g_a", "g_c", "G_db", "lam",
    "omega_a", "omega_c", "omega_d",
)
_RATE_KEYS = (
    "kappa_a", "kappa_c", "kappa_d", "gamma_b", "g_a", "g_c",
    "G_db", "lam", "J_a", "J_c",
)
_MODE_FREQ_KEYS = ("omega_a", "omega_c", "omega_d")


class ConfigError(ValueError):
    """Invalid configuration. ``problems`` lists every violated invariant."""

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class ConfigParseError(ConfigError):
    """Config text could not be parsed."""

    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__([message])


def thermal_occupation(omega, T):
    """
    Bose-Einstein mean occupation ``1/(exp(hbar*omega/(k_B*T)) - 1)``.

    Parameters
    ----------
    omega : float
        Mode frequency in rad/s, must be positive.
    T : float
        Bath temperature in K. ``T == 0`` returns exactly 0.

    Returns
    -------
    float
        Mean thermal occupation. Values below the double-precision range
        (``hbar*omega/(k_B*T) > ~745``) underflow to 0.0.
    """
    if not omega > 0:
        raise ValueError(f"omega must be positive, got {omega!r}")
    if T < 0:
        raise ValueError(f"T must be non-negative, got {T!r}")
    if T == 0:
        return 0.0
    # ratio of ratios so that subnormal T cannot underflow the denominator
    x = (HBAR / K_B) * (omega / T)
    if x > 700.0:
        # 1/(e^x - 1) == e^-x to double precision; underflows to 0 past ~745
        return math.exp(-x)
    return 1.0 / math.expm1(x)


def spin_count(diameter, rho=SPIN_DENSITY_YIG):
    """Number of spins ``rho * V`` in a sphere of the given diameter (m)."""
    if not diameter > 0:
        raise ValueError(f"diameter must be positive, got {diameter!r}")
    return rho * (4.0 / 3.0) * math.pi * (diameter / 2.0) ** 3


def rabi_frequency(B0, N, gamma=GYROMAGNETIC_YIG):
    """Drive Rabi frequency ``sqrt(5)/4 * gamma * sqrt(N) * B0`` in rad/s."""
    for name, v in (("B0", B0), ("N", N), ("gamma", gamma)):
        if not v > 0:
            raise ValueError(f"{name} must be positive, got {v!r}")
    return math.sqrt(5.0) / 4.0 * gamma * math.sqrt(N) * B0


@dataclass(frozen=True)
class DriveSpec:
    """Microwave drive of the magnons plus the coherent cavity drive.

    ``Omega`` is derived from the sphere and field when left as None.
    ``E`` drives the site-1 cavities only.
    """

    B0: float
    sphere_diameter: float
    g_db_bare: float
    rho_spin: float = SPIN_DENSITY_YIG
    gyromagnetic: float = GYROMAGNETIC_YIG
    Omega: Optional[float] = None
    E: float = 0.0

    @property
    def n_spins(self):
        return spin_count(self.sphere_diameter, self.rho_spin)

    @property
    def rabi(self):
        if self.Omega is not None:
            return self.Omega
        return rabi_frequency(self.B0, self.n_spins, self.gyromagnetic)

    def problems(self):
        out = []
        if not self.B0 > 0:
            out.append("drive.B0 must be > 0")
        if not self.sphere_diameter > 0:
            out.append("drive.sphere_diameter must be > 0")
        if not self.rho_spin > 0:
            out.append("drive.rho_spin must be > 0")
        if not self.gyromagnetic > 0:
            out.append("drive.gyromagnetic must be > 0")
        if not self.g_db_bare >= 0:
            out.append("drive.g_db_bare must be >= 0")
        if self.Omega is not None and not self.Omega >= 0:
            out.append("drive.Omega must be >= 0")
        return out


@dataclass(frozen=True)
class SiteParams:
    """Resolved parameters of one site (all rates in rad/s)."""

    omega_b: float
    delta_a: float
    delta_c: float
    delta_d: float
    kappa_a: float
    kappa_c: float
    kappa_d: float
    gamma_b: float
    g_a: float
    g_c: float
    G_db: Optional[float]
    lam: float
    omega_a: float
    omega_c: float
    omega_d: float


@dataclass(frozen=True)
class SystemConfig:
    """All parameters of the two-site model.

    Rates and frequencies are in rad/s, ``T`` in K, ``theta`` in rad.
    ``G_db`` is the effective magnomechanical coupling; leave it None and
    supply ``drive`` to derive it from the mean field instead.
    ``site2`` holds per-site overrides and is only honoured when
    ``symmetric_sites`` is False.
    """

    omega_b: float
    delta_a: float
    delta_c: float
    delta_d: float
    kappa_a: float
    kappa_c: float
    kappa_d: float
    gamma_b: float
    g_a: float
    g_c: float
    G_db: Optional[float] = None
    lam: float = 0.0
    theta: float = 0.0
    J_a: float = 0.0
    J_c: float = 0.0
    T: float = 0.0
    omega_a: float = TWO_PI * 10e9
    omega_c: float = TWO_PI * 10e9
    omega_d: float = TWO_PI * 10e9
    symmetric_sites: bool = True
    full_linearization: bool = False
    fold_mean_field_shift: bool = False
    drive: Optional[DriveSpec] = None
    site2: tuple = ()

    def __post_init__(self):
        self.validate()

    def problems(self):
        out = []
        for k in _RATE_KEYS:
            v = getattr(self, k)
            if v is None:
                continue
            if not (isinstance(v, (int, float)) and math.isfinite(v)):
                out.append(f"{k} must be a finite number")
            elif v < 0:
                out.append(f"{k} must be >= 0, got {v!r}")
        for k in ("delta_a", "delta_c", "delta_d"):
            if not math.isfinite(getattr(self, k)):
                out.append(f"{k} must be finite")
        if not self.omega_b > 0:
            out.append(f"omega_b must be > 0, got {self.omega_b!r}")
        for k in _MODE_FREQ_KEYS:
            if not getattr(self, k) > 0:
                out.append(f"{k} must be > 0")
        if not self.T >= 0:
            out.append(f"T must be >= 0, got {self.T!r}")
        if not 0.0 <= self.theta < TWO_PI:
            out.append(f"theta must lie in [0, 2pi), got {self.theta!r}")
        if self.G_db is not None and self.drive is not None:
            out.append("G_db and drive are mutually exclusive")
        if self.G_db is None and self.drive is None:
            out.append("one of G_db or drive is required")
        if self.drive is not None:
            out.extend(self.drive.problems())
        for k, v in self.site2:
            if k not in SITE_KEYS:
                out.append(f"site2.{k} is not a per-site parameter")
            elif k == "G_db" and self.G_db is None:
                out.append("site2.G_db requires G_db in [system]")
            elif not (math.isfinite(v) and (k.startswith("delta") or v >= 0)):
                out.append(f"site2.{k} invalid: {v!r}")
            elif (k == "omega_b" or k in _MODE_FREQ_KEYS) and not v > 0:
                out.append(f"site2.{k} must be > 0")
        return out

    def validate(self):
        problems = self.problems()
        if problems:
            raise ConfigError(problems)

    def site(self, j):
        """Per-site parameters for site ``j`` (1 or 2)."""
        if j not in (1, 2):
            raise IndexError(f"site index must be 1 or 2, got {j!r}")
        values = {k: getattr(self, k) for k in SITE_KEYS}
        if j == 2 and not self.symmetric_sites:
            values.update(dict(self.site2))
        return SiteParams(**values)

    def replace(self, **changes):
        """Copy with fields changed; the result is validated again."""
        return dataclasses.replace(self, **changes)


# ---------------------------------------------------------------------------
# config file grammar

# (section, file key, attribute, kind)
_SCHEMA = [
    ("system", "omega_b", "omega_b", "freq"),
    ("system", "delta_a", "delta_a", "freq"),
    ("system", "delta_c", "delta_c", "freq"),
    ("system", "delta_d", "delta_d", "freq"),
    ("system", "kappa_a", "kappa_a", "freq"),
    ("system", "kappa_c", "kappa_c", "freq"),
    ("system", "kappa_d", "kappa_d", "freq"),
    ("system", "gamma_b", "gamma_b", "freq"),
    ("system", "g_a", "g_a", "freq"),
    ("system", "g_c", "g_c", "freq"),
    ("system", "G_db", "G_db", "freq"),
    ("system", "lambda", "lam", "freq"),
    ("system", "theta", "theta", "angle"),
    ("system", "J_a", "J_a", "freq"),
    ("system", "J_c", "J_c", "freq"),
    ("bath", "T", "T", "temp"),
    ("bath", "omega_a", "omega_a", "freq"),
    ("bath", "omega_c", "omega_c", "freq"),
    ("bath", "omega_d", "omega_d", "freq"),
    ("flags", "symmetric_sites", "symmetric_sites", "bool"),
    ("flags", "full_linearization", "full_linearization", "bool"),
    ("flags", "fold_mean_field_shift", "fold_mean_field_shift", "bool"),
]
_DRIVE_SCHEMA = [
    ("B0", "B0", "field"),
    ("sphere_diameter", "sphere_diameter", "length"),
    ("rho_spin", "rho_spin", "plain"),
    ("gyromagnetic", "gyromagnetic", "gyro"),
    ("g_db_bare", "g_db_bare", "freq"),
    ("Omega", "Omega", "freq"),
    ("E", "E", "freq"),
]
_REQUIRED = {
    "omega_b", "delta_a", "delta_c", "delta_d", "kappa_a", "kappa_c",
    "kappa_d", "gamma_b", "g_a", "g_c",
}
_FILE_KEY = {attr: key for _, key, attr, _ in _SCHEMA}
_ATTR_KIND = {attr: kind for _, _, attr, kind in _SCHEMA}

# multiplier to internal units; bare numbers use the first entry
_UNITS = {
    "freq": {"": TWO_PI, "hz": TWO_PI, "khz": TWO_PI * 1e3,
             "mhz": TWO_PI * 1e6, "ghz": TWO_PI * 1e9, "rad/s": 1.0},
    "gyro": {"": TWO_PI, "hz/t": TWO_PI, "ghz/t": TWO_PI * 1e9,
             "rad/(s*t)": 1.0},
    "temp": {"": 1.0, "k": 1.0, "mk": 1e-3, "uk": 1e-6},
    "angle": {"": 1.0, "rad": 1.0, "deg": math.pi / 180.0},
    "field": {"": 1.0, "t": 1.0, "mt": 1e-3, "ut": 1e-6},
    "length": {"": 1.0, "m": 1.0, "mm": 1e-3, "um": 1e-6},
    "plain": {"": 1.0},
}
_VALUE_RE = re.compile(r"^\s*([-+0-9.eE]+(?:[eE][-+]?\d+)?)\s*(\S*)\s*$")


def _line_of(text, section, key):
    current = None
    for i, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        if s.startswith("[") and s.endswith("]"):
            current = s[1:-1].strip()
        elif current == section and "=" in s:
            if s.split("=", 1)[0].strip() == key:
                return i
    return None


def _parse_value(raw, kind, where, lineno):
    if kind == "bool":
        low = raw.strip().lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ConfigParseError(f"{where}: expected a boolean, got {raw!r}", lineno)
    m = _VALUE_RE.match(raw)
    if not m:
        raise ConfigParseError(f"{where}: cannot parse {raw!r}", lineno)
    try:
        number = float(m.group(1))
    except ValueError:
        raise ConfigParseError(f"{where}: cannot parse {raw!r}", lineno) from None
    unit = m.group(2).lower()
    table = _UNITS[kind]
    if unit not in table:
        allowed = ", ".join(u for u in table if u) or "none"
        raise ConfigParseError(
            f"{where}: unknown unit {m.group(2)!r} (allowed: {allowed})", lineno)
    return number * table[unit]


def loads_config(text):
    """Parse config text; see :func:`load_config`."""
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.ParsingError as exc:
        lineno = exc.errors[0][0] if exc.errors else None
        raise ConfigParseError(f"malformed line {exc.errors[0][1]!s}", lineno) from None
    except configparser.Error as exc:
        raise ConfigParseError(str(exc), getattr(exc, "lineno", None)) from None

    known_sections = {"system", "bath", "flags", "drive", "site2"}
    problems = [f"unknown section [{s}]" for s in parser.sections() if s not in known_sections]

    values = {}
    seen = set()
    for section, key, attr, kind in _SCHEMA:
        if parser.has_option(section, key):
            lineno = _line_of(text, section, key)
            values[attr] = _parse_value(parser.get(section, key), kind, f"{section}.{key}", lineno)
            seen.add((section, key))
    for section in ("system", "bath", "flags"):
        if parser.has_section(section):
            for key in parser.options(section):
                if (section, key) not in seen:
                    problems.append(f"unknown key {section}.{key}")

    if parser.has_section("drive"):
        dvals = {}
        for key, attr, kind in _DRIVE_SCHEMA:
            if parser.has_option("drive", key):
                lineno = _line_of(text, "drive", key)
                dvals[attr] = _parse_value(parser.get("drive", key), kind, f"drive.{key}", lineno)
        for key in parser.options("drive"):
            if key not in {k for k, _, _ in _DRIVE_SCHEMA}:
                problems.append(f"unknown key drive.{key}")
        missing = [k for k in ("B0", "sphere_diameter", "g_db_bare") if k not in dvals]
        problems.extend(f"missing required key drive.{k}" for k in missing)
        if not missing:
            values["drive"] = DriveSpec(**dvals)

    if parser.has_section("site2"):
        site2 = []
        for key in parser.options("site2"):
            attr = "lam" if key == "lambda" else key
            if attr not in SITE_KEYS:
                problems.append(f"unknown key site2.{key}")
                continue
            lineno = _line_of(text, "site2", key)
            site2.append((attr, _parse_value(parser.get("site2", key), _ATTR_KIND[attr],
                                             f"site2.{key}", lineno)))
        values["site2"] = tuple(site2)

    problems.extend(f"missing required key system.{_FILE_KEY[k]}"
                    for k in sorted(_REQUIRED) if k not in values)
    if problems:
        raise ConfigError(problems)
    return SystemConfig(**values)


def load_config(path):
    """
    Read and validate a config file.

    The file is INI-style with sections ``[system]``, ``[bath]``,
    ``[flags]`` and the optional ``[drive]`` and ``[site2]``. A bare
    number for a frequency-like key is ``value/2pi`` in Hz and becomes
    ``2*pi*value`` rad/s; a unit suffix (``kHz``, ``MHz``, ``GHz``,
    ``rad/s``) may be appended. Temperatures accept ``K``, ``mK``, ``uK``.

    Raises
    ------
    ConfigParseError
        Malformed text; carries the offending line number.
    ConfigError
        Missing keys or violated invariants, all listed at once.
    """
    with open(path, encoding="utf-8") as fh:
        return loads_config(fh.read())


def _format_freq(x):
    # prefer the /2pi Hz form, but only if it reloads bit-exactly
    h = x / TWO_PI
    for cand in (h, math.nextafter(h, math.inf), math.nextafter(h, -math.inf)):
        if cand * TWO_PI == x:
            return repr(cand)
    return f"{x!r} rad/s"


def _format(value, kind):
    if kind == "bool":
        return "true" if value else "false"
    if kind in ("freq", "gyro"):
        if kind == "gyro":
            h = value / TWO_PI
            return repr(h) if h * TWO_PI == value else f"{value!r} rad/(s*T)"
        return _format_freq(value)
    return repr(value)


def dump_config(config):
    """Serialize ``config`` to text that :func:`loads_config` reproduces exactly."""
    lines = []
    for section in ("system", "bath", "flags"):
        lines.append(f"[{section}]")
        for sec, key, attr, kind in _SCHEMA:
            if sec != section:
                continue
            value = getattr(config, attr)
            if value is None:
                continue
            lines.append(f"{key} = {_format(value, kind)}")
        lines.append("")
    if config.drive is not None:
        lines.append("[drive]")
        for key, attr, kind in _DRIVE_SCHEMA:
            value = getattr(config.drive, attr)
            if value is not None:
                lines.append(f"{key} = {_format(value, kind)}")
        lines.append("")
    if config.site2:
        lines.append("[site2]")
        for attr, value in config.site2:
            lines.append(f"{_FILE_KEY[attr]} = {_format(value, _ATTR_KIND[attr])}")
        lines.append("")
    return "\n".join(lines)


def config_hash(config):
    """SHA-256 of the canonical serialization."""
    return hashlib.sha256(dump_config(config).encode("utf-8")).hexdigest()


def baseline_config(**changes):
    """Symmetric two-site operating point used by the figure presets."""
    w_b = TWO_PI * 10e6
    kappa = TWO_PI * 1e6
    g = TWO_PI * 4.8e6
    values = dict(
        omega_b=w_b,
        delta_a=w_b,
        delta_c=w_b,
        delta_d=0.4 * w_b,
        kappa_a=kappa,
        kappa_c=kappa,
        kappa_d=0.6 * kappa,
        gamma_b=TWO_PI * 100.0,
        g_a=g,
        g_c=g,
        G_db=TWO_PI * 0.1e6,
        lam=0.05 * g,
        theta=0.0,
        J_a=0.5 * g,
        J_c=0.5 * g,
        T=0.1e-3,
    )
    values.update(changes)
    return SystemConfig(**values)


def describe(config):
    """Human-readable listing of every resolved parameter in rad/s and /2pi Hz."""
    rows = []
    for _, key, attr, kind in _SCHEMA:
        value = getattr(config, attr)
        if value is None:
            continue
        if kind == "freq":
            rows.append(f"{key:<22s} {value:>16.8g} rad/s   {value / TWO_PI:>14.8g} Hz (/2pi)")
        elif kind == "temp":
            rows.append(f"{key:<22s} {value:>16.8g} K")
        elif kind == "angle":
            rows.append(f"{key:<22s} {value:>16.8g} rad")
        else:
            rows.append(f"{key:<22s} {value!s:>16s}")
    if config.drive is not None:
        d = config.drive
        rows.append(f"{'drive.B0':<22s} {d.B0:>16.8g} T")
        rows.append(f"{'drive.sphere_diameter':<22s} {d.sphere_diameter:>16.8g} m")
        rows.append(f"{'drive.N_spins':<22s} {d.n_spins:>16.8g}")
        rows.append(f"{'drive.Omega':<22s} {d.rabi:>16.8g} rad/s   {d.rabi / TWO_PI:>14.8g} Hz (/2pi)")
        rows.append(f"{'drive.E':<22s} {d.E:>16.8g} rad/s   {d.E / TWO_PI:>14.8g} Hz (/2pi)")
        rows.append(f"{'drive.g_db_bare':<22s} {d.g_db_bare:>16.8g} rad/s   {d.g_db_bare / TWO_PI:>14.8g} Hz (/2pi)")
    for attr, value in config.site2:
        rows.append(f"site2.{attr:<16s} {value:>16.8g}")
    return "\n".join(rows)
