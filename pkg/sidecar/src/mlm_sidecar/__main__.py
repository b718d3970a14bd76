"""Run the service: python -m mlm_sidecar [--host H] [--port P] [--model NAME]

The model can also be chosen with MLM_SIDECAR_MODEL; the flag wins.
"""

from __future__ import annotations

import argparse
import os

import uvicorn

from .app import create_app


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int,
                        default=int(os.environ.get("MLM_SIDECAR_PORT", "8757")))
    parser.add_argument("--model", default=None,
                        help="model name; default from MLM_SIDECAR_MODEL")
    args = parser.parse_args()

    if args.model:
        os.environ["MLM_SIDECAR_MODEL"] = args.model
    uvicorn.run(create_app(), host=args.host, port=args.port, log_level="warning")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
