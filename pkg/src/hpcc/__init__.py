"""Secretive hotplug coded caching toolkit."""
