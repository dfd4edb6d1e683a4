"""
Versioned plain-text model files

Every file starts with `format_version 1` and `kind convex|pwca|simplex`;
floats are written with repr() so that a save/load round trip is bit-exact.
An optional `domain_lower` / `domain_upper` pair stores the (x, y) box the
model was fitted on.
"""
import os
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Union

import numpy as np

from ..exceptions import DataFormatError, PwcaError
from .convex_fit import ConvexModel
from .dataset import Box
from .geometry import Hyperplane, RotationParams
from .pwca import PwcaModel
from .triangulation import Triangulation

FORMAT_VERSION = 1

Model = Union[ConvexModel, PwcaModel, Triangulation]


@dataclass
class StoredModel:
    """A model together with the domain it was fitted on"""
    model: Model
    domain: Optional[Box] = None

    @property
    def kind(self) -> str:
        return model_kind(self.model)


def model_kind(model: Model) -> str:
    if isinstance(model, ConvexModel):
        return 'convex'
    if isinstance(model, PwcaModel):
        return 'pwca'
    if isinstance(model, Triangulation):
        return 'simplex'
    raise DataFormatError(f"Cannot serialize {type(model).__name__}")


def _numbers(values: Iterable[float]) -> str:
    return ' '.join(repr(float(v)) for v in values)


def model_to_text(model: Model, domain: Optional[Box] = None) -> str:
    kind = model_kind(model)
    lines = [f"format_version {FORMAT_VERSION}", f"kind {kind}"]

    if isinstance(model, ConvexModel):
        lines += [f"dimension {model.dimension}", f"orientation {model.orientation}"]
        lines += [f"plane {_numbers(p.coefs)}" for p in model.planes]
    elif isinstance(model, PwcaModel):
        lines += [f"dimension {model.dimension}", f"orientation {model.orientation}",
                  f"interface {_numbers(model.interface.coefs)}"]
        lines += [f"lower {_numbers(p.coefs)}" for p in model.lower]
        lines += [f"upper {_numbers(p.coefs)}" for p in model.upper]
        params = model.params
        if params is not None:
            lines += [f"r1 {_numbers(params.r1)}", f"s1 {float(params.s1)!r}"]
            lines += [f"r2 {_numbers(row)}" for row in params.r2]
            lines += [f"s2 {_numbers(params.s2)}",
                      f"r3_minus {_numbers(params.r3_minus)}",
                      f"r3_plus {_numbers(params.r3_plus)}"]
    else:
        lines += [f"dimension {model.dimension}", f"scheme {model.scheme}",
                  f"segments {' '.join(str(k) for k in model.segments)}",
                  f"box_lower {_numbers(model.box.lower)}",
                  f"box_upper {_numbers(model.box.upper)}"]
        for i, vertex in enumerate(model.vertices):
            value = '' if model.values is None else f" {float(model.values[i])!r}"
            lines.append(f"vertex {_numbers(vertex)}{value}")
        lines += [f"simplex {' '.join(str(v) for v in s)}" for s in model.simplices]

    if domain is not None:
        lines += [f"domain_lower {_numbers(domain.lower)}",
                  f"domain_upper {_numbers(domain.upper)}"]
    lines.append('end')
    return '\n'.join(lines) + '\n'


def _parse(text: str) -> Dict[str, List[List[str]]]:
    records: Dict[str, List[List[str]]] = {}
    ended = False
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith('#'):
            continue
        if ended:
            raise DataFormatError(f"Line {number}: content after 'end'")
        key, *fields = line.split()
        if key == 'end':
            ended = True
            continue
        records.setdefault(key, []).append(fields)
    if not ended:
        raise DataFormatError("Model file is truncated (missing 'end')")
    return records


def _single(records: Dict[str, List[List[str]]], key: str) -> List[str]:
    rows = records.get(key)
    if not rows or len(rows) != 1:
        raise DataFormatError(f"Model file needs exactly one '{key}' line")
    return rows[0]


def _floats(fields: List[str]) -> np.ndarray:
    try:
        return np.array([float(f) for f in fields], dtype=float)
    except ValueError as e:
        raise DataFormatError(f"Invalid number in model file: {e}")


def model_from_text(text: str) -> StoredModel:
    """
    Parse a model file

    Raises:
        DataFormatError: On unknown versions or kinds, missing lines or invalid values
    """
    records = _parse(text)
    version = _single(records, 'format_version')
    if version != [str(FORMAT_VERSION)]:
        raise DataFormatError(f"Unsupported model format version {' '.join(version)}")
    kind = ' '.join(_single(records, 'kind'))

    try:
        if kind == 'convex':
            orientation = _single(records, 'orientation')[0]
            planes = tuple(Hyperplane(_floats(row)) for row in records.get('plane', []))
            model: Model = ConvexModel(planes, orientation)
        elif kind == 'pwca':
            orientation = _single(records, 'orientation')[0]
            params = None
            if 'r1' in records:
                pairs = len(records.get('lower', []))
                r2_rows = [_floats(row) for row in records.get('r2', []) if row]
                params = RotationParams(
                    r1=_floats(_single(records, 'r1')),
                    s1=float(_floats(_single(records, 's1'))[0]),
                    r2=np.array(r2_rows).reshape(pairs, -1) if r2_rows else np.zeros((pairs, 0)),
                    s2=_floats(_single(records, 's2')),
                    r3_minus=_floats(_single(records, 'r3_minus')),
                    r3_plus=_floats(_single(records, 'r3_plus')),
                )
            model = PwcaModel(
                lower=tuple(Hyperplane(_floats(row)) for row in records.get('lower', [])),
                upper=tuple(Hyperplane(_floats(row)) for row in records.get('upper', [])),
                interface=Hyperplane(_floats(_single(records, 'interface'))),
                params=params,
                orientation=orientation,
            )
        elif kind == 'simplex':
            d = int(_single(records, 'dimension')[0])
            rows = [_floats(row) for row in records.get('vertex', [])]
            if not rows:
                raise DataFormatError("Simplex model has no vertices")
            widths = {len(r) for r in rows}
            if not widths <= {d, d + 1} or len(widths) != 1:
                raise DataFormatError("Vertex lines must all carry the same number of fields")
            table = np.array(rows)
            model = Triangulation(
                vertices=table[:, :d],
                simplices=np.array([[int(v) for v in row] for row in records.get('simplex', [])]),
                box=Box(_floats(_single(records, 'box_lower')),
                        _floats(_single(records, 'box_upper'))),
                segments=tuple(int(k) for k in _single(records, 'segments')),
                scheme=_single(records, 'scheme')[0],
                values=table[:, d] if table.shape[1] == d + 1 else None,
            )
        else:
            raise DataFormatError(f"Unknown model kind {kind!r}")

        domain = None
        if 'domain_lower' in records:
            domain = Box(_floats(_single(records, 'domain_lower')),
                         _floats(_single(records, 'domain_upper')))
    except DataFormatError:
        raise
    except (PwcaError, ValueError, IndexError) as e:
        raise DataFormatError(f"Invalid {kind} model: {e}")

    return StoredModel(model, domain)


def save_model(model: Model, path: Union[str, os.PathLike],
               domain: Optional[Box] = None) -> str:
    with open(path, 'w', encoding='utf-8') as handle:
        handle.write(model_to_text(model, domain))
    return str(path)


def load_model(path: Union[str, os.PathLike]) -> StoredModel:
    try:
        with open(path, 'r', encoding='utf-8') as handle:
            text = handle.read()
    except OSError as e:
        raise DataFormatError(f"Cannot read model file {path}: {e}")
    return model_from_text(text)
