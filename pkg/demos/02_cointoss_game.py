"""Play one honest coin-toss round over the message protocol.

Alice commits a toss, Bob guesses, Alice reveals, Bob verifies. The same
seeded round is then replayed over a loopback TCP socket to show the two
transports produce byte-identical transcripts.
"""

import json

from qbcsim.scheme import SchemeParams, build_reveal_agreement
from qbcsim.session import AliceScript, BobScript, run_session

COIN = ("head", "tail")


def describe(result):
    for frame in result.transcript:
        payload = json.loads(frame)
        kind = payload.pop("kind")
        payload.pop("v")
        payload.pop("scheme_hash")
        if kind == "commit":
            payload["state"] = payload["state"].split("\n")[0] + " ..."
        print(f"  {kind}: {payload}")
    v = result.verification
    print(f"  verdict: accepted={v.accepted} recovered element={v.recovered_element}")


def main():
    agreement = build_reveal_agreement(SchemeParams.paper_cointoss())

    toss, guess = 1, 0  # Alice tosses tail, Bob calls head
    print(f"Alice commits {COIN[toss]!r}, Bob guesses {COIN[guess]!r}")
    result = run_session(
        agreement, AliceScript(choice=toss), BobScript(guess=guess), seed=7
    )
    describe(result)
    revealed = json.loads(result.transcript[2])["choice"]
    wins = result.verification.accepted and guess == revealed
    print(f"  Bob wins: {'yes' if wins else 'no'}")
    print()

    print("same round over loopback TCP:")
    replay = run_session(
        agreement, AliceScript(choice=toss), BobScript(guess=guess), seed=7,
        transport="tcp",
    )
    print(f"  transcripts identical: {replay.transcript == result.transcript}")


if __name__ == "__main__":
    main()
