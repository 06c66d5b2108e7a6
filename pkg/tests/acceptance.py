"""Bookkeeping for the acceptance suite: one verdict line per criterion."""

import time

VERDICTS: dict[int, tuple[str, bool, str]] = {}


class Notes:
    def __init__(self):
        self.parts: list[str] = []

    def add(self, text: str) -> None:
        self.parts.append(text)


def criterion(number: int, name: str):
    def wrap(fn):
        def run():
            notes = Notes()
            start = time.perf_counter()
            try:
                fn(notes)
            except BaseException as exc:
                detail = "; ".join(notes.parts + [f"{type(exc).__name__}: {str(exc).splitlines()[0] if str(exc) else ''}"])
                VERDICTS[number] = (name, False, detail)
                print(f"criterion {number} FAIL {name}: {detail}")
                raise
            notes.add(f"{time.perf_counter() - start:.1f} s")
            VERDICTS[number] = (name, True, "; ".join(notes.parts))
            print(f"criterion {number} PASS {name}: {'; '.join(notes.parts)}")

        run.__name__ = fn.__name__
        return run

    return wrap
