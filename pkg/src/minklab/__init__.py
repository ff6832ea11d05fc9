"""Exact continued-fraction trees, the question-mark measure, and streaming
block-frequency analysis of the digit streams they generate."""

__version__ = "0.1.0"

from .cfcore import (
    Dyadic,
    Word,
    cf_to_code,
    cf_to_code_int,
    cf_to_rational,
    check_block,
    check_word,
    code_int_to_cf,
    code_to_cf,
    digit_sum,
    format_block,
    format_cf,
    format_rational,
    parse_cf,
    parse_rational,
    rational_to_cf,
    word_level,
)
from .trees import (
    OrderingId,
    aks_sequence,
    count_words_with_sum,
    cumulative_bit_count,
    cumulative_digit_count,
    farey_children,
    farey_level,
    farey_word,
    iter_ordering,
    kepler_children,
    kepler_index,
    kepler_level,
    kepler_level_children,
    level_bit_count,
    level_digit_count,
    ordering,
    q_of_n,
)
from .qmark import (
    Interval,
    cylinder_gauss,
    cylinder_interval,
    cylinder_qmark,
    gauss_partial_sum,
    qmark_cf,
    qmark_rational,
    qmark_real,
)
from .streams import (
    Checkpoint,
    DigitStream,
    aks_stream,
    champernowne_bits,
    farey_stream,
    kepler_perm_stream,
    kepler_stream,
    leb128_decode,
    leb128_encode,
    pack_bits,
    stream_for,
    stream_to_real,
    unpack_bits,
)
from .analyzer import (
    CrossCheck,
    FrequencyReport,
    FrequencyRow,
    OccurrenceBreakdown,
    block_patterns,
    classify_occurrences,
    count_block,
    count_block_naive,
    cross_check_pattern_vs_direct,
    divided_ratio_curve,
    empirical_cdf,
    frequency_report,
    pattern_counts_in_bits,
)
from .prng import fisher_yates_permutation, splitmix64_stream
