"""Run configuration, artifact storage, runtime state and figure targets."""
