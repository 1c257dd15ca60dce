"""Services module for run orchestration."""
