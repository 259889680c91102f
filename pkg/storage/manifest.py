"""
输出清单
记录每个输出文件的 SHA-256 摘要，并关联所用的证书
"""

import os
import hashlib
from typing import Dict, Optional

from storage.tables import read_json, write_json

MANIFEST_NAME = "manifest.json"


def file_digest(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


class Manifest:
    """输出目录的文件清单"""

    def __init__(self, out_dir: str):
        self.out_dir = out_dir
        self.files: Dict[str, str] = {}
        self.certificate: Optional[str] = None
        self.info: Dict = {}

    def add(self, path: str):
        """登记文件，键为相对输出目录的路径"""
        name = os.path.relpath(path, self.out_dir).replace(os.sep, "/")
        self.files[name] = file_digest(path)

    def set_certificate(self, path: str):
        self.add(path)
        self.certificate = os.path.relpath(path, self.out_dir).replace(os.sep, "/")

    def to_dict(self) -> dict:
        return {
            "files": dict(sorted(self.files.items())),
            "certificate": self.certificate,
            "certificate_sha256": self.files.get(self.certificate) if self.certificate else None,
            "info": self.info,
        }

    def save(self) -> str:
        path = os.path.join(self.out_dir, MANIFEST_NAME)
        return write_json(path, self.to_dict())

    def verify(self) -> Dict[str, bool]:
        """重新计算摘要，返回 {文件: 是否一致}"""
        result = {}
        for name, digest in self.files.items():
            path = os.path.join(self.out_dir, name)
            result[name] = os.path.exists(path) and file_digest(path) == digest
        return result

    @classmethod
    def load(cls, out_dir: str) -> "Manifest":
        data = read_json(os.path.join(out_dir, MANIFEST_NAME))
        manifest = cls(out_dir)
        manifest.files = dict(data.get("files", {}))
        manifest.certificate = data.get("certificate")
        manifest.info = dict(data.get("info", {}))
        return manifest
