"""Tests for the registry and the dictionary codec.
"""

from dataclasses import dataclass
import pytest
from lipscope.struct.codec import DictCodec, DictObject
from lipscope.struct.registry import Registry

def test_registry():
    registry = Registry('activation')
    registry['first'] = 1
    registry['second'] = 2
    assert registry['first'] == 1
    assert registry.get_key(2) == 'second'
    assert registry.names() == ['first', 'second']

    with pytest.raises(ValueError):
        registry['first'] = 3
    with pytest.raises(ValueError):
        registry['third'] = 1

    with pytest.raises(KeyError) as info:
        registry['missing']
    assert 'first, second' in str(info.value)

@dataclass(frozen = True)
class _Point:
    y: float
    x: float

class _PointCodec(DictCodec[_Point]):

    def encode(self, obj: _Point) -> DictObject:
        return {'y': obj.y, 'x': obj.x}

    def decode(self, obj: DictObject) -> _Point:
        return _Point(obj['y'], obj['x'])

def test_codec_text_is_stable(tmp_path):
    codec = _PointCodec()
    text = codec.dumps(_Point(2.0, 1.0))
    assert text.index('"x"') < text.index('"y"')
    assert codec.loads(text) == _Point(2.0, 1.0)

    path = str(tmp_path / 'point.json')
    codec.write(path, _Point(0.5, -3.0))
    assert codec.read(path) == _Point(0.5, -3.0)
    with open(path, encoding = 'UTF-8') as file:
        assert file.read() == codec.dumps(_Point(0.5, -3.0)) + '\n'
