from hypothesis import settings

# fixed example streams keep run times and failures reproducible
settings.register_profile("repro", derandomize=True, deadline=None)
settings.load_profile("repro")
