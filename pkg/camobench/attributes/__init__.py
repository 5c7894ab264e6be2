"""Fine-grained camouflage attributes: BM, CB, CP, DC, MM, OC, SA, SO."""

from camobench.attributes.classify import (
    ATTRIBUTE_NAMES,
    AttributeFlags,
    AttributeResult,
    classify_attributes,
    classify_dataset,
)
from camobench.attributes.csvio import ATTRIBUTE_HEADER, load_attribute_csv, write_attribute_csv
from camobench.attributes.features import (
    chi_square,
    color_chi_square,
    combined_distance,
    lab_histogram,
    lbp_bins,
    lbp_codes,
    texture_histogram,
)
from camobench.attributes.flags import (
    COMPLEXITY_MEASURES,
    bm_flag,
    cb_flag,
    cp_flag,
    gradient_complexity,
    mask_centroid,
    register_complexity,
    sa_flag,
    so_flag,
)
from camobench.attributes.gabrat import dc_gabrat, outline_pixels
from camobench.attributes.superpixels import (
    Side,
    Superpixel,
    slic_superpixels,
    superpixel_features,
)

__all__ = [
    "ATTRIBUTE_HEADER",
    "ATTRIBUTE_NAMES",
    "AttributeFlags",
    "AttributeResult",
    "COMPLEXITY_MEASURES",
    "Side",
    "Superpixel",
    "bm_flag",
    "cb_flag",
    "chi_square",
    "classify_attributes",
    "classify_dataset",
    "color_chi_square",
    "combined_distance",
    "cp_flag",
    "dc_gabrat",
    "gradient_complexity",
    "lab_histogram",
    "lbp_bins",
    "lbp_codes",
    "load_attribute_csv",
    "mask_centroid",
    "outline_pixels",
    "register_complexity",
    "sa_flag",
    "slic_superpixels",
    "so_flag",
    "superpixel_features",
    "texture_histogram",
    "write_attribute_csv",
]
