import os

from hypothesis import settings

os.chdir(os.path.realpath(os.path.dirname(__file__)))

# engine runs take well over hypothesis' default per-example deadline
settings.register_profile('symmean', deadline=None)
settings.load_profile('symmean')
