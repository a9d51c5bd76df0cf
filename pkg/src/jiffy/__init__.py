"""Jiffy: lossless compression for LiDAR range and attribute scan sequences.

Pipeline: quantize -> zero-mask -> flatten -> delta -> ZigZag -> patched
frame-of-reference bitpacking, with automatic intra/predicted scan coding
and a checksummed stream container.

Quick use::

    from jiffy import (Scan, ScanType, QuantizationSpec, quantize,
                       CodecState, encode, decode)

    spec = QuantizationSpec(precision_um=1000, sample_width=2)
    scan = quantize(range_image_m, spec)            # float meters -> Scan
    state = CodecState()
    enc = encode(scan, state)                       # EncodedScan
    ...

Streams on disk go through jiffy.container (StreamWriter / StreamReader);
the `jiffy` console script wraps the whole thing.
"""

from .bench import run_ablation, run_bench, run_heuristic_eval, run_sweep
from .bitmask import (compact, expand, extract_mask, pack_mask, unpack_mask,
                      xor_mask)
from .bytecomp import compress_block, decompress_block
from .codec import (DEFAULT_PIPELINE, CodecState, DecoderState, EncodedScan,
                    EncoderState, Mode, ModeConfig, PipelineConfig, Policy,
                    decode, encode, encode_i, encode_p, select_mode)
from .container import (StreamHeader, StreamReader, StreamWriter, read_stream,
                        write_stream)
from .errors import (BadMagicError, ChecksumMismatchError, CorruptStreamError,
                     JiffyError, TruncatedStreamError, UnknownCodecError,
                     UnsupportedVersionError)
from .intcodec import (delta_decode, delta_encode, pfor_decode, pfor_encode,
                       zigzag_decode, zigzag_encode)
from .rawio import RawSequenceSpec
from .scan import (BeamLayout, QuantizationSpec, Scan, ScanType, canonicalize,
                   dequantize, quantize)
from .synthetic import generate

__version__ = "0.1.0"

__all__ = [
    "Scan", "ScanType", "QuantizationSpec", "BeamLayout",
    "quantize", "dequantize", "canonicalize",
    "extract_mask", "compact", "expand", "xor_mask", "pack_mask",
    "unpack_mask", "compress_block", "decompress_block",
    "delta_encode", "delta_decode", "zigzag_encode", "zigzag_decode",
    "pfor_encode", "pfor_decode",
    "Mode", "Policy", "ModeConfig", "PipelineConfig", "DEFAULT_PIPELINE",
    "CodecState", "EncoderState", "DecoderState", "EncodedScan",
    "encode", "encode_i", "encode_p", "select_mode", "decode",
    "StreamHeader", "StreamWriter", "StreamReader", "read_stream",
    "write_stream", "RawSequenceSpec", "generate",
    "run_bench", "run_ablation", "run_sweep", "run_heuristic_eval",
    "JiffyError", "CorruptStreamError", "TruncatedStreamError",
    "ChecksumMismatchError", "BadMagicError", "UnsupportedVersionError",
    "UnknownCodecError",
    "__version__",
]
