from hypothesis import settings

# statistical tests elsewhere in the suite run on pinned seeds; keep the
# property tests reproducible too
settings.register_profile("deterministic", derandomize=True, deadline=None)
settings.load_profile("deterministic")
