"""Neural-network surrogates for option pricing, with the pricing oracles that label them."""

__version__ = "0.1.0"
