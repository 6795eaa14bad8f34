"""Reference numbers for the five dielectric-estimate rows and the default experiment setup."""

# (target, P_tilde, c_bckgr interval, c_est interval)
DIELECTRIC_ROWS = [
    ("Bush", 6.24, (1.0, 1.0), (6.24, 6.24)),
    ("Wood stake", 5.43, (1.0, 1.0), (5.43, 5.43)),
    ("Metal box", 5.75, (3.0, 5.0), (17.25, 28.75)),
    ("Metal cylinder", 6.48, (3.0, 5.0), (19.44, 32.40)),
    ("Plastic cylinder", 0.71, (3.0, 5.0), (2.13, 3.55)),
]

# default numerical setup of the synthetic experiments
H_X, H_K, K_LO, K_HI = 0.02, 0.1, 0.5, 1.5
LAMBDA_OPT, GAMMA, N_ITER, NOISE = 3.0, 1e-5, 5000, 0.05
X_LOCS = (0.1, 0.2, 0.3, 0.4)
WIDTH, CONTRAST = 0.1, 7.0
