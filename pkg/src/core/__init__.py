"""Grid functions, quadrature and exponential-kernel operators"""
