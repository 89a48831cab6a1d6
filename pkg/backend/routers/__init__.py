"""HTTP routers: matroids, fragility, certify."""
