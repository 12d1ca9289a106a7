"""Label-generating pricing oracles."""
from .american import crr_binomial, crr_binomial_american_put, ju_zhong_american_put, ju_zhong_put
from .barrier import uop_closed_form_gbm, uop_gbm
from .black_scholes import bs_call, bs_european_call, bs_european_put, bs_put
from .fft import FftConfig, fft_call_batch, fft_european_call, fft_european_put
from .monte_carlo import McConfig, PriceEstimate, mc_uop_price, simulate_paths

__all__ = [
    "FftConfig",
    "McConfig",
    "PriceEstimate",
    "bs_call",
    "bs_put",
    "bs_european_call",
    "bs_european_put",
    "fft_call_batch",
    "fft_european_call",
    "fft_european_put",
    "uop_gbm",
    "uop_closed_form_gbm",
    "simulate_paths",
    "mc_uop_price",
    "ju_zhong_put",
    "ju_zhong_american_put",
    "crr_binomial",
    "crr_binomial_american_put",
]
