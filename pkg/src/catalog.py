"""Named algebras and frames, and resolution of CLI inputs.

A CLI input is either a catalog name or a path to a YAML/JSON document.
Resolvers return ``(value, error)`` pairs so the CLI can report input errors
without tracebacks.
"""

import logging
from functools import partial
from pathlib import Path
from typing import Callable, Optional, Union

from pydantic import ValidationError

from algebra import (
    Quantale,
    QuantaleError,
    make_boolean,
    make_godel_chain,
    make_lukasiewicz_chain,
    make_product,
    quantale_from_document,
)
from forcing import KripkeModel, ModelError
from formats import AlgebraDocument, FrameDocument, ModelDocument, load_document
from frames import Conucleus, FrameError, SOMonoid
from logic import FormulaParseError, Letter, Member, parse, render

logger = logging.getLogger(__name__)

INFINITY = "inf"

# Registry of named quantales
QUANTALES: dict[str, Callable[[], Quantale]] = {
    "boolean2": make_boolean,
    **{f"godel{n}": partial(make_godel_chain, n) for n in range(2, 6)},
    **{f"lukasiewicz{n}": partial(make_lukasiewicz_chain, n) for n in range(2, 6)},
    "boolean4": lambda: make_product(make_boolean(), make_boolean()),
}


def get_quantale(name: str) -> Quantale:
    """Get a catalog quantale by name.

    Raises:
        ValueError: If the name is not in the catalog.
    """
    if name not in QUANTALES:
        supported = ", ".join(QUANTALES.keys())
        raise ValueError(f"Unknown quantale: {name}. Supported: {supported}")
    return QUANTALES[name]()


def dual_frame(q: Quantale) -> SOMonoid:
    """dualize(q) with the new top (the old 0) labelled 'inf'."""
    names = list(q.names)
    names[q.bottom] = INFINITY
    return SOMonoid(names, q.leq.T, q.prod)


def frame_names() -> list[str]:
    return ["chain2"] + [f"dual-{name}" for name in QUANTALES]


def get_frame(name: str) -> SOMonoid:
    """Get a catalog frame by name ('chain2' or 'dual-<quantale>').

    Raises:
        ValueError: If the name is not in the catalog.
    """
    if name == "chain2":
        return dual_frame(make_boolean())
    if name.startswith("dual-") and name[len("dual-"):] in QUANTALES:
        return dual_frame(get_quantale(name[len("dual-"):]))
    raise ValueError(f"Unknown frame: {name}. Supported: {', '.join(frame_names())}")


def _read(source: str, model_class):
    data, error = load_document(source)
    if error:
        return None, error
    try:
        return model_class.model_validate(data), None
    except ValidationError as e:
        return None, f"Invalid {model_class.__name__}: {e}"


def _is_name(source: str) -> bool:
    return source != "-" and not Path(source).exists()


def resolve_algebra(
    source: str,
) -> tuple[Optional[Quantale], Optional[AlgebraDocument], Optional[str]]:
    """A quantale from a catalog name or an algebra file.

    Returns:
        tuple: (quantale, document or None for catalog names, error).
    """
    if _is_name(source) and source in QUANTALES:
        return get_quantale(source), None, None
    doc, error = _read(source, AlgebraDocument)
    if error:
        if _is_name(source):
            return None, None, f"Unknown quantale or missing file: {source}"
        return None, None, error
    try:
        return quantale_from_document(doc), doc, None
    except QuantaleError as e:
        return None, doc, f"{type(e).__name__}: {e}"


def frame_from_document(doc: FrameDocument) -> SOMonoid:
    """Build a frame from a validated document.

    Raises:
        FrameError: Invalid tables.
        QuantaleError: Invalid dual_of algebra.
        ValueError: Unknown catalog name in dual_of.
    """
    if doc.dual_of is None:
        return SOMonoid(doc.names, doc.leq, doc.prod)
    if isinstance(doc.dual_of, str):
        return dual_frame(get_quantale(doc.dual_of))
    return dual_frame(quantale_from_document(doc.dual_of))


def resolve_frame(
    source: Union[str, FrameDocument],
) -> tuple[Optional[SOMonoid], Optional[Conucleus], Optional[str]]:
    """A frame, and its conucleus when the document gives one.

    Returns:
        tuple: (frame, conucleus or None, error).
    """
    if isinstance(source, str):
        if _is_name(source):
            try:
                return get_frame(source), None, None
            except ValueError as e:
                return None, None, str(e)
        doc, error = _read(source, FrameDocument)
        if error:
            return None, None, error
    else:
        doc = source
    try:
        frame = frame_from_document(doc)
        delta = Conucleus(frame, tuple(doc.conucleus)) if doc.conucleus is not None else None
    except (FrameError, QuantaleError, ValueError) as e:
        return None, None, f"{type(e).__name__}: {e}"
    return frame, delta, None


def model_from_document(doc: ModelDocument) -> KripkeModel:
    """Build a Kripke model from a validated document.

    Raises:
        ModelError, FrameError, FormulaParseError, ValueError: Invalid content.
    """
    frame, delta, error = resolve_frame(doc.frame)
    if error:
        raise ModelError(error)
    if doc.delta == "identity":
        delta = delta or Conucleus.identity(frame)
    else:
        delta = Conucleus(frame, tuple(doc.delta))

    atomic = {}
    for text, worlds in doc.atomic.items():
        atom = parse(text, constants=doc.domain)
        if not isinstance(atom, (Letter, Member)):
            raise ModelError(f"Not an atomic sentence: {render(atom)}")
        atomic[atom] = [frame.index(w) if isinstance(w, str) else w for w in worlds]
    return KripkeModel(frame, delta, doc.domain, atomic)


def resolve_model(source: str) -> tuple[Optional[KripkeModel], Optional[str]]:
    """A Kripke model from a model file, or a catalog frame with identity δ.

    Returns:
        tuple: (model, error).
    """
    if _is_name(source):
        try:
            frame = get_frame(source)
        except ValueError as e:
            return None, str(e)
        return KripkeModel(frame, Conucleus.identity(frame)), None
    doc, error = _read(source, ModelDocument)
    if error:
        return None, error
    try:
        return model_from_document(doc), None
    except (ModelError, FrameError, QuantaleError, FormulaParseError, ValueError) as e:
        return None, f"{type(e).__name__}: {e}"
