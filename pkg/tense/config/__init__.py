from tense.config.service import ConfigService


DEFAULTS = ConfigService()
