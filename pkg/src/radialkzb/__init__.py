"""Exact radial components, Harish-Chandra series and boundary KZB operators."""
