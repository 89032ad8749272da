#!/usr/bin/env python3
"""Drive the live bridge programmatically: scripted hand poses over WebSocket.

Start the server first:   uapcbf serve --port 8700
Then run this script. It registers as the driver, streams a slow vertical hand
motion for five seconds, flips the method to CBF mid-run, and reports what the
state frames showed. The browser UI (frontend/) speaks the same protocol.
"""

import json
import math
import time

from websockets.sync.client import connect

URL = "ws://127.0.0.1:8700/ws"

with connect(URL) as ws:
    print(f"connected to {URL}")
    t0 = time.time()
    switched = False
    frames = 0
    min_h0 = float("inf")
    while time.time() - t0 < 5.0:
        t = time.time() - t0
        z = 0.12 + 0.10 * (1 - math.cos(2 * math.pi * t / 2.5)) / 2
        ws.send(json.dumps({"kind": "hand_pose", "t": t, "x": 0.50, "y": 0.0, "z": z}))
        if t > 2.5 and not switched:
            ws.send(json.dumps({"kind": "set_config", "method": "CBF"}))
            switched = True
        frame = json.loads(ws.recv())
        if frame.get("kind") == "state":
            frames += 1
            if frame.get("h0") is not None:
                min_h0 = min(min_h0, frame["h0"])
            if frames % 30 == 0:
                print(f"  t={frame['t']:.1f}s method={frame['method']} paused={frame['paused']} "
                      f"h0={frame.get('h0')} violations={frame['violation_count']}")
        time.sleep(1 / 30)
    print(f"\nreceived {frames} frames; min h0 {min_h0 if min_h0 < 1e9 else 'n/a'}")
