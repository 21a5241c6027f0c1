"""Run configuration: `[section]` headers and `key = value` lines, expressions in double quotes."""

from __future__ import annotations

import configparser
import hashlib
from dataclasses import dataclass

from .. import expr as ex

SECTIONS = ("model", "run", "init", "verify", "output", "climit", "monodromy")


class ConfigError(ValueError):
    pass


def _unquote(v: str) -> str:
    v = v.strip()
    if len(v) >= 2 and v[0] == v[-1] == '"':
        return v[1:-1]
    return v


@dataclass
class RunConfig:
    sections: dict
    sha256: str
    source: str

    def has(self, section, key):
        return key in self.sections.get(section, {})

    def get(self, section, key, default=None, required=False):
        sec = self.sections.get(section, {})
        if key not in sec:
            if required:
                raise ConfigError(f"[{section}] {key} is required")
            return default
        return sec[key]

    def _typed(self, section, key, default, required, conv, what):
        raw = self.get(section, key, None, required)
        if raw is None:
            return default
        try:
            return conv(raw)
        except (TypeError, ValueError):
            raise ConfigError(f"[{section}] {key} = {raw!r} is not {what}") from None

    def int(self, section, key, default=None, required=False, minimum=None):
        v = self._typed(section, key, default, required, int, "an integer")
        if v is not None and minimum is not None and v < minimum:
            raise ConfigError(f"[{section}] {key} must be >= {minimum}")
        return v

    def float(self, section, key, default=None, required=False, positive=False):
        v = self._typed(section, key, default, required, float, "a number")
        if v is not None and positive and not v > 0:
            raise ConfigError(f"[{section}] {key} must be positive")
        return v

    def bool(self, section, key, default=False):
        raw = self.get(section, key)
        if raw is None:
            return default
        low = raw.lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"[{section}] {key} = {raw!r} is not a boolean")

    def complex(self, section, key, default=None, required=False):
        raw = self.get(section, key, None, required)
        if raw is None:
            return default
        return constant_expr(raw, f"[{section}] {key}")

    def complex_list(self, section, key, default=()):
        raw = self.get(section, key)
        if raw is None:
            return tuple(default)
        return tuple(constant_expr(p, f"[{section}] {key}") for p in raw.split(",") if p.strip())

    def float_list(self, section, key, default=()):
        raw = self.get(section, key)
        if raw is None:
            return tuple(default)
        try:
            return tuple(float(p) for p in raw.split(",") if p.strip())
        except ValueError:
            raise ConfigError(f"[{section}] {key} must be a comma separated list of numbers") from None

    def seed(self, override=None):
        if override is not None:
            return override
        raw = self.get("run", "seed")
        if raw is None:
            return None
        try:
            s = int(raw, 0)
        except ValueError:
            raise ConfigError(f"[run] seed = {raw!r} is not an integer") from None
        if not 0 <= s < 2**64:
            raise ConfigError("[run] seed must be an unsigned 64-bit integer")
        return s


def constant_expr(text, where):
    try:
        e = ex.parse(text)
    except ex.ParseError as err:
        raise ConfigError(f"{where}: {err}") from None
    if ex.free_vars(e):
        raise ConfigError(f"{where}: expected a constant, found variables {sorted(ex.free_vars(e))}")
    return ex.evaluate(e)


def parse_config_text(text: str) -> RunConfig:
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",), strict=True)
    cp.optionxform = str  # keep case: the climit profile has both x and X
    try:
        cp.read_string(text)
    except configparser.Error as err:
        raise ConfigError(f"malformed config: {err}".replace("\n", " ")) from None
    unknown = [s for s in cp.sections() if s not in SECTIONS]
    if unknown:
        raise ConfigError(f"unknown section(s) {unknown}; allowed: {', '.join(SECTIONS)}")
    sections = {s: {k: _unquote(v) for k, v in cp[s].items()} for s in cp.sections()}
    return RunConfig(sections, hashlib.sha256(text.encode("utf-8")).hexdigest(), text)


def load_config(path) -> RunConfig:
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as err:
        raise ConfigError(f"cannot read config {path}: {err.strerror}") from None
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError:
        raise ConfigError(f"config {path} is not UTF-8") from None
    cfg = parse_config_text(text)
    cfg.sha256 = hashlib.sha256(raw).hexdigest()
    return cfg
