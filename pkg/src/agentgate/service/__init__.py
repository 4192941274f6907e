"""HTTP service shell: gateway core, API schemas, event stream, FastAPI app."""
