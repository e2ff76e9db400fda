"""Registry files: user-defined maps, weights, paths, and implicit
problems in INI syntax.

Section headers carry the object class and name: [map hump],
[weight wlin], [path circle1], [implicit cubic]. Vectors are
comma-separated; expression lists separate components with semicolons.
Membership predicates follow the sign convention: the domain is where
the expression is positive.

Example:

    [map hump]
    dim_in = 2
    dim_out = 2
    components = x + y^3 ; y
    jacobian = 1 ; 3*y^2 ; 0 ; 1
    domain = 4 - x^2 - y^2

    [weight wlin]
    family = affine
    a = 1
    b = 1

    [path arc]
    kind = expression
    components = cos(t) ; sin(t)
    domain = 0, 3.14159265358979

    [implicit cubic]
    map = cubic_implicit
    x_dim = 1
    w = 0
"""

from __future__ import annotations

import configparser
import os

import numpy as np

from .errors import InputError, LiftkitError
from .geometry import (
    Euclidean,
    ExpressionPath,
    Loop,
    Segment,
    Torus,
    polyline,
    subset_from_expression,
)
from .hadamard import (
    AffineWeight,
    ConstantWeight,
    ExpressionWeight,
    PowerWeight,
)
from .implicit import ImplicitProblem
from .mapdef import expression_map, resolve_map

__all__ = ["Registry", "load_registry", "parse_vector", "parse_weight_spec"]

_VAR_ORDER = ("x", "y", "z", "w")


def parse_vector(text):
    parts = [p.strip() for p in str(text).split(",")]
    if not parts or any(p == "" for p in parts):
        raise InputError("bad vector %r" % text)
    try:
        return np.array([float(p) for p in parts])
    except ValueError:
        raise InputError("bad vector %r" % text)


def _split_exprs(text):
    return [p.strip() for p in str(text).split(";") if p.strip()]


def _base_space(tag, dim):
    tag = (tag or "euclidean").strip().lower()
    if tag == "euclidean":
        return Euclidean(dim)
    if tag == "torus":
        return Torus(dim)
    raise InputError("unknown space annotation %r" % tag)


def parse_weight_spec(text):
    """Weight from a compact spec: constant:c, affine:a,b,
    power:a,b,gamma, or expr:<formula in t>."""
    text = str(text).strip()
    if ":" not in text:
        raise InputError(
            "weight spec needs family:params, e.g. affine:1,1 or expr:1+t"
        )
    family, rest = text.split(":", 1)
    family = family.strip().lower()
    if family in ("expr", "expression"):
        return ExpressionWeight(rest.strip())
    vals = parse_vector(rest)
    if family == "constant":
        if vals.size != 1:
            raise InputError("constant weight takes one parameter")
        return ConstantWeight(float(vals[0]))
    if family == "affine":
        if vals.size != 2:
            raise InputError("affine weight takes two parameters a,b")
        return AffineWeight(float(vals[0]), float(vals[1]))
    if family == "power":
        if vals.size != 3:
            raise InputError("power weight takes three parameters a,b,gamma")
        return PowerWeight(float(vals[0]), float(vals[1]), float(vals[2]))
    raise InputError("unknown weight family %r" % family)


class Registry:
    """Parsed registry file: named map/weight/path/implicit sections.

    Objects are built on access; validate() builds everything once and
    collects the failures.
    """

    def __init__(self, path=None):
        self.path = path
        self._maps = {}
        self._weights = {}
        self._paths = {}
        self._implicits = {}

    # -- section intake ----------------------------------------------------

    @classmethod
    def from_file(cls, path):
        if not os.path.exists(path):
            raise InputError("registry file %s does not exist" % path)
        cp = configparser.ConfigParser(interpolation=None)
        try:
            with open(path, "r", encoding="utf-8") as fh:
                cp.read_file(fh)
        except configparser.Error as err:
            raise InputError("registry parse error: %s" % err)
        reg = cls(path=path)
        for section in cp.sections():
            parts = section.split(None, 1)
            if len(parts) != 2:
                raise InputError(
                    "section [%s] needs the form [kind name]" % section
                )
            kind, name = parts[0].lower(), parts[1].strip()
            body = dict(cp[section])
            if kind == "map":
                reg._maps[name] = body
            elif kind == "weight":
                reg._weights[name] = body
            elif kind == "path":
                reg._paths[name] = body
            elif kind == "implicit":
                reg._implicits[name] = body
            else:
                raise InputError("unknown section kind %r in [%s]" % (kind, section))
        return reg

    def names(self):
        return {
            "maps": sorted(self._maps),
            "weights": sorted(self._weights),
            "paths": sorted(self._paths),
            "implicits": sorted(self._implicits),
        }

    # -- maps ----------------------------------------------------------------

    def has_map(self, name):
        return name in self._maps

    def get_map(self, name):
        if name not in self._maps:
            raise InputError("registry has no map %r" % name)
        body = self._maps[name]
        try:
            dim_in = int(body["dim_in"])
            dim_out = int(body["dim_out"])
            comp_src = body["components"]
        except KeyError as err:
            raise InputError("map %s is missing key %s" % (name, err))
        comps = _split_exprs(comp_src)
        if len(comps) != dim_out:
            raise InputError(
                "map %s declares dim_out = %d but has %d components"
                % (name, dim_out, len(comps))
            )
        variables = _VAR_ORDER[:dim_in]
        if dim_in > len(_VAR_ORDER):
            raise InputError("maps support at most %d variables" % len(_VAR_ORDER))
        domain = _base_space(body.get("space"), dim_in)
        codomain = _base_space(body.get("codomain_space"), dim_out)
        if "domain" in body:
            domain = subset_from_expression(domain, body["domain"], variables)
        jac_src = None
        if "jacobian" in body:
            jac_list = _split_exprs(body["jacobian"])
            if len(jac_list) != dim_in * dim_out:
                raise InputError(
                    "map %s jacobian needs %d expressions, got %d"
                    % (name, dim_in * dim_out, len(jac_list))
                )
            jac_src = "(" + ", ".join(jac_list) + ")"
        return expression_map(
            "(" + ", ".join(comps) + ")",
            variables=variables,
            domain=domain,
            codomain=codomain,
            jacobian_source=jac_src,
            name=name,
        )

    # -- weights ---------------------------------------------------------

    def has_weight(self, name):
        return name in self._weights

    def get_weight(self, name):
        if name not in self._weights:
            raise InputError("registry has no weight %r" % name)
        body = self._weights[name]
        family = body.get("family", "").strip().lower()
        if ":" in family:
            # compact one-line form, same syntax as the CLI weight spec
            return parse_weight_spec(body["family"])
        if family in ("expr", "expression"):
            if "expr" not in body:
                raise InputError("weight %s needs an expr key" % name)
            return ExpressionWeight(body["expr"])
        try:
            if family == "constant":
                return ConstantWeight(float(body["c"]))
            if family == "affine":
                return AffineWeight(float(body["a"]), float(body["b"]))
            if family == "power":
                return PowerWeight(
                    float(body["a"]), float(body["b"]), float(body["gamma"])
                )
        except KeyError as err:
            raise InputError("weight %s is missing key %s" % (name, err))
        raise InputError("weight %s has unknown family %r" % (name, family))

    # -- paths ---------------------------------------------------------------

    def has_path(self, name):
        return name in self._paths

    def get_path(self, name, space):
        """Build the named path in the given space (paths are stored as
        coordinate recipes; the space comes from the consuming map)."""
        if name not in self._paths:
            raise InputError("registry has no path %r" % name)
        body = self._paths[name]
        kind = body.get("kind", "").strip().lower()
        try:
            if kind == "segment":
                return Segment(
                    space, parse_vector(body["start"]), parse_vector(body["end"])
                )
            if kind == "loop":
                return Loop(
                    space,
                    parse_vector(body["center"]),
                    float(body["radius"]),
                    winding=int(body.get("winding", 1)),
                    phase=float(body.get("phase", 0.0)),
                )
            if kind == "polyline":
                knots = [parse_vector(k) for k in _split_exprs(body["knots"])]
                return polyline(space, np.stack(knots))
            if kind == "expression":
                dom = parse_vector(body.get("domain", "0, 1"))
                if dom.size != 2:
                    raise InputError("path %s domain needs two numbers" % name)
                comps = "(" + ", ".join(_split_exprs(body["components"])) + ")"
                return ExpressionPath(space, comps, (float(dom[0]), float(dom[1])))
        except KeyError as err:
            raise InputError("path %s is missing key %s" % (name, err))
        raise InputError("path %s has unknown kind %r" % (name, kind))

    # -- implicit problems -------------------------------------------------

    def has_implicit(self, name):
        return name in self._implicits

    def get_implicit(self, name):
        if name not in self._implicits:
            raise InputError("registry has no implicit problem %r" % name)
        body = self._implicits[name]
        try:
            map_ref = body["map"]
            x_dim = int(body["x_dim"])
            w = parse_vector(body["w"])
        except KeyError as err:
            raise InputError("implicit %s is missing key %s" % (name, err))
        f = resolve_map(map_ref, registry=self)
        return ImplicitProblem(f, x_dim, w)

    # -- validation ----------------------------------------------------------

    def validate(self):
        """Build every section; returns a list of (section, error) pairs."""
        problems = []
        for name in sorted(self._maps):
            try:
                self.get_map(name)
            except LiftkitError as err:
                problems.append(("map %s" % name, str(err)))
        for name in sorted(self._weights):
            try:
                self.get_weight(name)
            except LiftkitError as err:
                problems.append(("weight %s" % name, str(err)))
        for name in sorted(self._paths):
            try:
                # paths need a space; validate in a neutral one of the
                # right width by probing common dims
                built = False
                last = None
                for dim in (1, 2, 3, 4):
                    try:
                        self.get_path(name, Euclidean(dim))
                        built = True
                        break
                    except LiftkitError as err:
                        last = err
                if not built:
                    raise last
            except LiftkitError as err:
                problems.append(("path %s" % name, str(err)))
        for name in sorted(self._implicits):
            try:
                self.get_implicit(name)
            except LiftkitError as err:
                problems.append(("implicit %s" % name, str(err)))
        return problems


def load_registry(path):
    return Registry.from_file(path)
