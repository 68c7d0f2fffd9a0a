from hypothesis import HealthCheck, settings

# stream prefixes are memoised per object, so example timings vary a lot
settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")
