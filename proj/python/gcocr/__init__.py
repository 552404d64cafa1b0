"""Gradient-change character features, thinning and a CG-trained MLP."""

from ._gcocr import (
    CANONICAL_SIZE,
    EmptyGlyphError,
    Error,
    Model,
    NumericError,
    ParameterError,
    ParseError,
    RangeError,
    ShapeError,
    binarize,
    bounding_box,
    crop,
    evaluate,
    extract_features,
    load_pgm,
    normalize,
    run_experiment,
    run_pipeline,
    save_pgm,
    scale_to,
    synth_generate,
    thin,
    train,
)

__version__ = "0.1.0"
