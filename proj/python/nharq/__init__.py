from ._nharq import (  # noqa: F401
    build_frame,
    crc32,
    fec_decode,
    fec_encode,
    parse_frame,
    qpsk_demodulate,
    qpsk_modulate,
    render_csv,
    sinr_general,
    superimpose,
    sweep,
    whiten,
)
