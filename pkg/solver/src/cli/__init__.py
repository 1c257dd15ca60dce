# CLI Package
