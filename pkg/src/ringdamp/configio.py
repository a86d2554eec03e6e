"""Generic configuration-document helpers: YAML loading, strict key
checking, and dotted-path access used by both sweep axes and CLI overrides.
"""

import yaml

from .errors import ConfigError


def load_yaml(path):
    """Load a YAML document that must be a mapping."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = yaml.safe_load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"config file {path} is not valid YAML: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"config file {path} must contain a mapping")
    return doc


def check_keys(mapping, allowed, context):
    """Reject unknown keys; unknown keys are configuration errors."""
    unknown = sorted(set(mapping) - set(allowed))
    if unknown:
        raise ConfigError(
            f"unknown key(s) {unknown} in {context}; allowed: {sorted(allowed)}")


def require_keys(mapping, required, context):
    missing = sorted(set(required) - set(mapping))
    if missing:
        raise ConfigError(f"missing required key(s) {missing} in {context}")


def get_path(doc, path):
    node = doc
    for part in path.split("."):
        if not isinstance(node, dict) or part not in node:
            raise ConfigError(f"config has no key {path!r} (stopped at {part!r})")
        node = node[part]
    return node


def set_path(doc, path, value):
    """Set an existing dotted-path key; creating new keys is refused so that
    typos surface instead of silently configuring nothing."""
    parts = path.split(".")
    node = doc
    for part in parts[:-1]:
        if not isinstance(node, dict) or part not in node:
            raise ConfigError(f"config has no key {path!r} (stopped at {part!r})")
        node = node[part]
    if not isinstance(node, dict) or parts[-1] not in node:
        raise ConfigError(f"config has no key {path!r}")
    node[parts[-1]] = value


def parse_override(text):
    """Parse one ``dotted.path=value`` override; the value is read as YAML
    so numbers, booleans and strings all work."""
    if "=" not in text:
        raise ConfigError(f"override {text!r} must look like key.path=value")
    path, raw = text.split("=", 1)
    path = path.strip()
    if not path:
        raise ConfigError(f"override {text!r} has an empty key path")
    try:
        value = yaml.safe_load(raw)
    except yaml.YAMLError as exc:
        raise ConfigError(f"override value {raw!r} is not valid YAML: {exc}") from exc
    if isinstance(value, str):
        # YAML leaves exponent forms without a dot ("5e-5") as strings
        try:
            value = float(value)
        except ValueError:
            pass
    return path, value


def apply_overrides(doc, overrides):
    for text in overrides:
        path, value = parse_override(text)
        set_path(doc, path, value)
    return doc
