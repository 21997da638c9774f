"""Minimal foreign implementation of the segment-query wire protocol.

Loads a manifest plus its label maps and answers POST /v1/segment-query with
ground truth, independently of the C++ code. Binds an ephemeral port and
writes it to the file given as argv[2].
"""

import json
import os
import struct
import sys
from http.server import BaseHTTPRequestHandler, HTTPServer

PREFIXES = [
    "<IMAGE> Can you segment the ",
    "<IMAGE> Could you segment the ",
    "<IMAGE> Would you mind segmenting the ",
    "<IMAGE> Can you find and segment the ",
]
SUFFIXES = [" in this image?", " in this picture?"]


def read_lseg(path):
    with open(path, "rb") as f:
        blob = f.read()
    assert blob[:4] == b"LSEG"
    w, h = struct.unpack_from("<II", blob, 4)
    ids = struct.unpack_from(f"<{w * h}H", blob, 12)
    return w, h, ids


def rle_encode(bits):
    runs = []
    current = 0
    length = 0
    for b in bits:
        v = 1 if b else 0
        if v == current:
            length += 1
        else:
            runs.append(length)
            current = v
            length = 1
    if length:
        runs.append(length)
    return ",".join(str(r) for r in runs)


class Dataset:
    def __init__(self, manifest_path):
        root = os.path.dirname(os.path.abspath(manifest_path))
        doc = json.load(open(manifest_path))
        self.by_name = {c["name"]: c["id"] for c in doc["categories"]}
        self.images = {}
        for image in doc["images"]:
            self.images[image["id"]] = read_lseg(os.path.join(root, image["labelmap"]))

    def answer(self, image_id, query):
        names = None
        for p in PREFIXES:
            for s in SUFFIXES:
                if query.startswith(p) and query.endswith(s) and len(query) > len(p) + len(s):
                    names = query[len(p):len(query) - len(s)].split(", ")
        if names is None or image_id not in self.images:
            return None
        w, h, ids = self.images[image_id]
        items = []
        masks = []
        for name in names:
            cid = self.by_name.get(name)
            present = cid is not None and cid in ids
            if present:
                items.append(name + "<SEG>")
                masks.append({
                    "rle": rle_encode([i == cid for i in ids]),
                    "width": w,
                    "height": h,
                })
            else:
                items.append(name + "<NEG>")
        text = ",".join(items) + "." if items else "none of the requested classes are present."
        return {"text": text, "masks": masks}


def main():
    dataset = Dataset(sys.argv[1])

    class Handler(BaseHTTPRequestHandler):
        def do_POST(self):
            if self.path != "/v1/segment-query":
                self.send_error(404)
                return
            body = json.loads(self.rfile.read(int(self.headers["Content-Length"])))
            reply = dataset.answer(body["image_id"], body["query"])
            if reply is None:
                self.send_error(400)
                return
            payload = json.dumps(reply).encode()
            self.send_response(200)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(payload)))
            self.end_headers()
            self.wfile.write(payload)

        def log_message(self, *args):
            pass

    server = HTTPServer(("127.0.0.1", 0), Handler)
    with open(sys.argv[2], "w") as f:
        f.write(str(server.server_port))
    server.serve_forever()


if __name__ == "__main__":
    main()
