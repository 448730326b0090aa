# Pydantic models for specs, configs, reports and API envelopes
