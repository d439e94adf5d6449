# (this file is intentionally empty)